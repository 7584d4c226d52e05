// Coverage of SL2(Z/N) by integer matrices of bounded entries, for a few prime levels.
#include <cstdio>

#include "latlab/lifting.hpp"

int main() {
  using namespace latlab;
  std::printf("%4s %8s %6s %10s %10s\n", "N", "index", "T_full", "kappa(0.5)", "kappa(0.99)");
  for (std::int64_t N : {5, 7, 11, 13}) {
    auto q = enumerate_quotient(SubgroupSpec::principal(N));
    auto curve = full_coverage_curve(q);
    auto half = lifting_exponent(curve, 0.5);
    auto most = lifting_exponent(curve, 0.99);
    std::printf("%4lld %8zu %6lld %10.4f %10.4f\n", static_cast<long long>(N), q.index(),
                static_cast<long long>(curve.rows.back().T), half.kappa, most.kappa);
  }
}
