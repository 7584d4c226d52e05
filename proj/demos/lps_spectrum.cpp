// Builds an LPS graph and reports its extreme eigenvalues against the Ramanujan bound.
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "latlab/spectral.hpp"

int main(int argc, char** argv) {
  using namespace latlab;
  std::int64_t p = argc > 1 ? std::atoll(argv[1]) : 5;
  std::int64_t q = argc > 2 ? std::atoll(argv[2]) : 13;
  try {
    Graph g = build_lps(p, q);
    auto adj = adjacency_spectrum(g);
    auto nb = nonbacktracking_spectrum(g, NbMethod::ihara, &adj);
    auto rep = ramanujan_report(adj, nb);
    std::printf("%s: %zu vertices, degree %d, %s\n", g.provenance.c_str(), g.vertex_count(), g.degree(),
                adj.bipartite ? "bipartite" : "not bipartite");
    std::printf("largest nontrivial |lambda| = %.6f  (2 sqrt(q) = %.6f)\n", rep.max_nontrivial_adjacency,
                2 * std::sqrt(static_cast<double>(rep.q)));
    std::printf("largest nontrivial |mu|     = %.6f  (sqrt(q)   = %.6f)\n", rep.max_nontrivial_nb,
                std::sqrt(static_cast<double>(rep.q)));
    std::printf("Ramanujan: %s\n", rep.adjacency_ramanujan ? "yes" : "no");
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.code());
  }
}
