#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sublin {

// Misuse of an operation (width mismatch, out-of-range index, u == v, ...).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// A caller-side precondition that the callee re-verified by querying and found false.
struct PreconditionViolated : std::logic_error {
    using std::logic_error::logic_error;
};

// Raised by a ledger when a counter would pass its ceiling. Recoverable: the
// harness records the trial as "overbudget".
struct BudgetExhausted : std::runtime_error {
    enum class Counter { queries, samples };
    BudgetExhausted(Counter c, std::uint64_t limit)
        : std::runtime_error(std::string(c == Counter::queries ? "query" : "sample") +
                             " budget of " + std::to_string(limit) + " exhausted"),
          counter(c), limit(limit) {}
    Counter counter;
    std::uint64_t limit;
};

// Brute-force oracles refuse inputs beyond their enumeration ceiling.
struct SizeRefused : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const char* what) {
    if (!cond) throw ContractViolation(what);
}

}  // namespace sublin
