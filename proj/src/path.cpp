#include "pinlab/path.hpp"

#include <algorithm>
#include <functional>

#include "pinlab/error.hpp"

namespace pinlab {

PathSample PathSample::from_contacts(int length, std::vector<int> contacts) {
  if (contacts.empty() || contacts.back() != length) throw DomainError("path: last contact must be N");
  PathSample s;
  s.length = length;
  s.m = static_cast<int>(contacts.size());
  s.eta_sorted.reserve(contacts.size());
  int prev = 0;
  for (int c : contacts) {
    if (c <= prev) throw DomainError("path: contacts must be strictly ascending in 1..N");
    s.eta_sorted.push_back(c - prev);
    prev = c;
  }
  std::sort(s.eta_sorted.begin(), s.eta_sorted.end(), std::greater<>());
  s.eta1_frac = static_cast<double>(s.eta_sorted[0]) / length;
  s.eta2_frac = s.m >= 2 ? static_cast<double>(s.eta_sorted[1]) / length : 0.0;
  s.contacts = std::move(contacts);
  return s;
}

Observables observables(const PathSample& s) {
  return {static_cast<double>(s.m) / s.length, s.eta1_frac, s.eta2_frac};
}

}  // namespace pinlab
