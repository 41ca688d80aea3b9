// Shared result types for the property checkers.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arbor {

struct Violation {
    std::string check;
    std::string detail;
    std::optional<int> block;                       // node index in the decomposition tree
    std::optional<std::pair<int, int>> window;      // child index range [first, last]
};

/// Collected violations; `ok()` when empty. Counts are kept per check name so
/// callers can see which families actually ran.
struct CheckOutcome {
    std::vector<Violation> violations;
    std::vector<std::pair<std::string, std::size_t>> evaluated;

    bool ok() const { return violations.empty(); }

    void note(const std::string& check, std::size_t count = 1) {
        for (auto& [name, c] : evaluated) {
            if (name == check) {
                c += count;
                return;
            }
        }
        evaluated.emplace_back(check, count);
    }

    void fail(std::string check, std::string detail, std::optional<int> block = std::nullopt,
              std::optional<std::pair<int, int>> window = std::nullopt) {
        violations.push_back({std::move(check), std::move(detail), block, window});
    }

    void merge(const CheckOutcome& other) {
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
        for (const auto& [name, c] : other.evaluated) note(name, c);
    }

    std::string summary(std::size_t limit = 5) const {
        std::string out;
        for (std::size_t i = 0; i < violations.size() && i < limit; ++i) {
            if (i) out += "; ";
            out += violations[i].check + ": " + violations[i].detail;
        }
        if (violations.size() > limit) out += "; ... (" + std::to_string(violations.size()) + " total)";
        return out;
    }
};

}  // namespace arbor
