#pragma once

#include <vector>

namespace pinlab {

/// A contact set τ ∩ (0, N] with N a contact, and its excursion statistics.
struct PathSample {
  int length = 0;                // N
  std::vector<int> contacts;     // ascending, last == N
  int m = 0;                     // number of contacts
  std::vector<int> eta_sorted;   // excursion lengths, descending
  double eta1_frac = 0.0;        // largest excursion / N
  double eta2_frac = 0.0;        // second largest / N; 0 when m == 1

  /// Throws DomainError unless `contacts` is strictly ascending in 1..N and ends at N.
  static PathSample from_contacts(int length, std::vector<int> contacts);
};

struct Observables {
  double contact_frac = 0.0;
  double eta1_frac = 0.0;
  double eta2_frac = 0.0;
};

Observables observables(const PathSample& s);

}  // namespace pinlab
