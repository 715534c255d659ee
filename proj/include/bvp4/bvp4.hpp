#ifndef BVP4_BVP4_HPP
#define BVP4_BVP4_HPP

#include "bvp4/errors.hpp"
#include "bvp4/linalg.hpp"
#include "bvp4/quadrature.hpp"
#include "bvp4/greens.hpp"
#include "bvp4/problem.hpp"
#include "bvp4/fast_apply.hpp"
#include "bvp4/local_solver.hpp"
#include "bvp4/matching.hpp"
#include "bvp4/driver.hpp"
#include "bvp4/greens_validation.hpp"

#endif  // BVP4_BVP4_HPP
