#pragma once

#include "c0ip/afem.hpp"
#include "c0ip/assembly.hpp"
#include "c0ip/error_metrics.hpp"
#include "c0ip/estimator.hpp"
#include "c0ip/fe_space.hpp"
#include "c0ip/fields.hpp"
#include "c0ip/geometry.hpp"
#include "c0ip/kkt.hpp"
#include "c0ip/manufactured.hpp"
#include "c0ip/mesh.hpp"
#include "c0ip/quadrature.hpp"
#include "c0ip/report.hpp"
