// Small tour of the library: one totient value, one count, one constant.
#include <cstdio>

#include "totlab/totlab.hpp"

int main() {
  using namespace totlab;

  // Pairs (a, b) mod 10 with a^2 + b^2 coprime to 10.
  std::printf("Phi_2(10) = %s\n", phi_k(10, 2).get_str().c_str());

  const CountRecord rec = count_phi_ratio(1, 0, 1000, Rational(500));
  std::printf("#{n <= 1000 : phi(n) <= 500} = %llu (%s)\n", static_cast<unsigned long long>(rec.count),
              std::string(to_string(rec.regime->tag)).c_str());

  const auto r = r_value(1, 1.0);
  std::printf("R_1(1) = %.12f  zeta(2)zeta(3)/zeta(6) = %.12f  (P = %llu, tail <= %.1e)\n", r.value.real(),
              zeta_real(2) * zeta_real(3) / zeta_real(6), static_cast<unsigned long long>(r.truncation_prime),
              r.tail_bound);

  const auto ext = verify_extremal(1, 1000);
  std::printf("primorial ratio at p_1000 = %llu: %.6f\n", static_cast<unsigned long long>(ext.rows.back().p_s),
              ext.rows.back().ratio);
  return 0;
}
