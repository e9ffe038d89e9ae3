#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace kmu {

/// UpperBound checks pass when value < tolerance (residual-style);
/// LowerBound checks pass when value > tolerance (nondegeneracy-style).
enum class CheckKind { UpperBound, LowerBound };

struct CheckEntry {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::UpperBound;
  bool applicable = true;

  bool pass() const {
    if (!applicable) return true;
    return kind == CheckKind::UpperBound ? value < tolerance : value > tolerance;
  }
};

struct ResidualReport {
  std::vector<CheckEntry> entries;

  void add(std::string name, double value, double tolerance,
           CheckKind kind = CheckKind::UpperBound, bool applicable = true) {
    entries.push_back({std::move(name), value, tolerance, kind, applicable});
  }

  bool pass() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const CheckEntry& e) { return e.pass(); });
  }

  double max_residual() const {
    double worst = 0.0;
    for (const auto& e : entries)
      if (e.applicable && e.kind == CheckKind::UpperBound)
        worst = std::max(worst, e.value);
    return worst;
  }

  const CheckEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
};

}  // namespace kmu
