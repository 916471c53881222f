#ifndef TPD_REGIMES_HPP
#define TPD_REGIMES_HPP

#include <string>
#include <vector>

#include "tpd/rational.hpp"

namespace tpd {

/* Closed-form speed thresholds and competitiveness guarantees.  Everything a
 * policy precondition or adversary construction compares against comes from
 * here, so the formulas live in exactly one place. */

struct CassRegime {
  int s;      // anchor depth of the subtree-comparison strategy
  Rat bound;  // largest intruder speed the strategy tolerates
  Rat ratio;  // guaranteed competitive ratio (integer-valued: delta^s)
};

struct RegimeRow {
  int rho = 0;
  Rat rho_over_d;
  Rat thm1;            // above this, a single entrance stream already wins
  Rat thm2;            // at or above this, two coordinated releases win
  Rat thm3_lo;         // lower end of the three-release window
  bool thm3_applies = false;
  Rat sweep_bound;     // below this, perpetual sweeping is 1-competitive
  Rat sap_bound;       // regime of the stay-at-perimeter strategy
  Rat sap_ratio;
  std::vector<CassRegime> cass_bounds;  // one entry per s in 1..rho
};

Rat thm1_bound(int d, int rho);        // (d-rho) / (2 rho)
Rat thm2_bound(int d, int rho);        // (d-rho) / (d+rho)
Rat thm3_lower_bound(int d, int rho);  // (d-rho) / (d+3 rho)

/* Exact check of the slack inequality tying speed to the lateness budget
 * eps = d + 3 rho - (d-rho)/v.  Rejects speeds with eps < 0 (too slow for the
 * three-release window). */
bool eq2_holds(int d, int rho, const Rat& v);

/* Largest speed against which the full-tree sweep loses nobody:
 * (d-rho) / (W - (d-rho)) with W the closed-walk length of the tree. */
Rat sweeping_speed_bound(int d, int delta, int rho);

Rat sap_speed_bound(int d, int rho);  // (d-rho) / (6 rho)
Rat sap_ratio(int delta, int rho);    // (3 delta^rho - 1) / 2

/* Speed regime and ratio of the depth-s subtree comparison strategy.
 * Requires 1 <= s <= rho. */
Rat cass_speed_bound(int d, int delta, int rho, int s);
Rat cass_ratio(int delta, int s);  // delta^s

/* Round-trip length of one comparison epoch: root -> depth-s anchor -> full
 * sweep of the anchored subtree -> root. */
Rat cass_epoch_length(int d, int delta, int s);

RegimeRow thresholds(int d, int delta, int rho);

/* One row per rho in 1..d-1. */
std::vector<RegimeRow> regime_table(int d, int delta);

/* Flat CSV, one line per (rho, s) pair.  Exact p/q columns first, then the
 * 12-significant-digit decimal mirrors for plotting. */
std::string regime_csv(int d, int delta, const std::vector<RegimeRow>& rows);

}  // namespace tpd

#endif
