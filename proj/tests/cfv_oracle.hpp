#ifndef ENN_TESTS_CFV_ORACLE_HPP_
#define ENN_TESTS_CFV_ORACLE_HPP_

#include <algorithm>
#include <cmath>

#include "enn/burgers.hpp"

namespace enn::testing {

struct CfvCheck {
  double balance = 0.0;  // |F - r|
  double nodal = 0.0;    // mismatch of the returned nodal values
};

// Rebuilds the shock-region balance from the raw pre-step data of a shock
// pair and the returned update.
inline CfvCheck check_cfv(const CfvAudit& a) {
  const double tau = a.tau;
  const double* b = a.b_prev;
  const double* u = a.u_prev;
  const double d = b[2] - b[1];
  const double ubar = 0.5 * (u[1] + u[2]);
  const double jump = u[1] - u[2];
  const double ml = (u[1] - u[0]) / (b[1] - b[0]);
  const double mr = (u[3] - u[2]) / (b[3] - b[2]);

  const double bt_l = b[2] + tau * u[2];
  const double bt_r = b[1] + tau * u[1];
  const double foot_l = (bt_l + tau * (ml * b[1] - u[1])) / (1.0 + tau * ml);
  const double foot_r = (bt_r + tau * (mr * b[2] - u[2])) / (1.0 + tau * mr);
  const double ut_l = u[1] - ml * (b[1] - foot_l);
  const double ut_r = u[2] + mr * (foot_r - b[2]);
  const double ml_new = ml / (1.0 + tau * ml);
  const double mr_new = mr / (1.0 + tau * mr);

  const double bl = a.b_left;
  const double ul = ut_l + ml_new * (bl - bt_l);
  const double ur = ut_r - mr_new * (bt_r - bl - d);

  const double two_f = (bl - bt_l) * (ut_l + a.u_left) + d * (a.u_left + a.u_right) +
                       (bt_r - bl - d) * (a.u_right + ut_r);
  const double two_r = 2.0 * d * ubar + tau * jump * ubar -
                       0.5 * tau * (ut_r * ut_r - ut_l * ut_l) +
                       tau * (u[1] * ut_r - u[2] * ut_l) - d * (2.0 * ubar + ut_l + ut_r);
  return {0.5 * std::abs(two_f - two_r),
          std::max(std::abs(ul - a.u_left), std::abs(ur - a.u_right))};
}

}  // namespace enn::testing

#endif  // ENN_TESTS_CFV_ORACLE_HPP_
