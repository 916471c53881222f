#include "tpd/regimes.hpp"

#include <sstream>

namespace tpd {

namespace {

void check_params(int d, int delta, int rho) {
  if (d < 2) throw ValidationError("d must satisfy d >= 2");
  if (delta < 2) throw ValidationError("delta must satisfy delta >= 2");
  if (rho < 1 || rho >= d) throw ValidationError("rho must satisfy 1 <= rho < d");
}

Rat ipow(int base, int exp) {
  mpz_class z;
  mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(base),
                static_cast<unsigned long>(exp));
  return Rat(z);
}

// (delta^(levels) - 1) / (delta - 1): vertices of a full delta-ary tree with
// `levels` levels counted as a geometric sum.
Rat geom_count(int delta, int levels) {
  return (ipow(delta, levels) - 1) / (delta - 1);
}

}  // namespace

Rat thm1_bound(int d, int rho) {
  check_params(d, 2, rho);
  return Rat(d - rho) / (2 * rho);
}

Rat thm2_bound(int d, int rho) {
  check_params(d, 2, rho);
  return Rat(d - rho) / (d + rho);
}

Rat thm3_lower_bound(int d, int rho) {
  check_params(d, 2, rho);
  return Rat(d - rho) / (d + 3 * rho);
}

bool eq2_holds(int d, int rho, const Rat& v) {
  check_params(d, 2, rho);
  if (v <= 0) throw ValidationError("speed must be positive");
  Rat eps = d + 3 * rho - Rat(d - rho) / v;
  if (eps < 0) throw ValidationError("speed below the three-release window");
  Rat lhs = d + rho + 2 * Rat(d - rho) * (1 - v) / (1 + v) - 2 * eps * v / (1 + v);
  Rat rhs = Rat(d - rho) / v;
  return lhs > rhs;
}

Rat sweeping_speed_bound(int d, int delta, int rho) {
  check_params(d, delta, rho);
  Rat walk = 2 * (geom_count(delta, d + 1) - 1);
  return Rat(d - rho) / (walk - (d - rho));
}

Rat sap_speed_bound(int d, int rho) {
  check_params(d, 2, rho);
  return Rat(d - rho) / (6 * rho);
}

Rat sap_ratio(int delta, int rho) {
  if (delta < 2) throw ValidationError("delta must satisfy delta >= 2");
  if (rho < 1) throw ValidationError("rho must satisfy 1 <= rho < d");
  return (3 * ipow(delta, rho) - 1) / 2;
}

Rat cass_speed_bound(int d, int delta, int rho, int s) {
  check_params(d, delta, rho);
  if (s < 1 || s > rho) throw ValidationError("s must satisfy 1 <= s <= rho");
  Rat denom = 4 * (s + ipow(delta, d - s + 1) / (delta - 1) - 1);
  return Rat(d - rho) / denom;
}

Rat cass_ratio(int delta, int s) {
  if (delta < 2) throw ValidationError("delta must satisfy delta >= 2");
  if (s < 1) throw ValidationError("s must satisfy 1 <= s <= rho");
  return ipow(delta, s);
}

Rat cass_epoch_length(int d, int delta, int s) {
  check_params(d, delta, 1);
  if (s < 1 || s >= d) throw ValidationError("s must satisfy 1 <= s < d");
  return 2 * (s + geom_count(delta, d - s + 1) - 1);
}

RegimeRow thresholds(int d, int delta, int rho) {
  check_params(d, delta, rho);
  RegimeRow row;
  row.rho = rho;
  row.rho_over_d = Rat(rho, d);
  row.rho_over_d.canonicalize();
  row.thm1 = thm1_bound(d, rho);
  row.thm2 = thm2_bound(d, rho);
  row.thm3_lo = thm3_lower_bound(d, rho);
  // The three-release construction needs three perimeter vertices pairwise
  // 2 rho apart (three distinct root branches) and a nonempty speed window,
  // probed at its lower end where the lateness budget vanishes.
  row.thm3_applies = delta >= 3 && eq2_holds(d, rho, row.thm3_lo);
  row.sweep_bound = sweeping_speed_bound(d, delta, rho);
  row.sap_bound = sap_speed_bound(d, rho);
  row.sap_ratio = sap_ratio(delta, rho);
  for (int s = 1; s <= rho; ++s)
    row.cass_bounds.push_back(
        {s, cass_speed_bound(d, delta, rho, s), cass_ratio(delta, s)});
  return row;
}

std::vector<RegimeRow> regime_table(int d, int delta) {
  check_params(d, delta, 1);
  std::vector<RegimeRow> rows;
  for (int rho = 1; rho < d; ++rho) rows.push_back(thresholds(d, delta, rho));
  return rows;
}

std::string regime_csv(int d, int delta, const std::vector<RegimeRow>& rows) {
  std::ostringstream out;
  out << "d,delta,rho,rho_over_d,thm1,thm2,thm3_lo,thm3_applies,"
         "sweep_bound,sap_bound,sap_ratio,cass_s,cass_bound,cass_ratio,"
         "rho_over_d_dec,thm1_dec,thm2_dec,thm3_lo_dec,sweep_bound_dec,"
         "sap_bound_dec,sap_ratio_dec,cass_bound_dec\n";
  for (const RegimeRow& row : rows) {
    for (const CassRegime& cr : row.cass_bounds) {
      out << d << ',' << delta << ',' << row.rho << ','
          << rat_str(row.rho_over_d) << ',' << rat_str(row.thm1) << ','
          << rat_str(row.thm2) << ',' << rat_str(row.thm3_lo) << ','
          << (row.thm3_applies ? "true" : "false") << ','
          << rat_str(row.sweep_bound) << ',' << rat_str(row.sap_bound) << ','
          << rat_str(row.sap_ratio) << ',' << cr.s << ',' << rat_str(cr.bound)
          << ',' << rat_str(cr.ratio) << ',' << rat_decimal(row.rho_over_d)
          << ',' << rat_decimal(row.thm1) << ',' << rat_decimal(row.thm2)
          << ',' << rat_decimal(row.thm3_lo) << ','
          << rat_decimal(row.sweep_bound) << ',' << rat_decimal(row.sap_bound)
          << ',' << rat_decimal(row.sap_ratio) << ',' << rat_decimal(cr.bound)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace tpd
