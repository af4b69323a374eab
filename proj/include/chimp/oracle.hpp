#pragma once

#include <optional>
#include <vector>

#include "chimp/trace.hpp"

namespace chimp {

// Thrown by Oracle::settle when the pending-work queue does not drain within
// the configured budget; the driver reports it as a blocked run.
struct SettleBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownPredicateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The capability set any backend must provide to the driver. A backend
// instance is owned by one driver run at a time.
class Oracle {
public:
    virtual ~Oracle() = default;

    // Applies a concrete event. Returns true (applied, state advanced) or
    // false (disabled); exactly one of the two, never both, never throws for
    // concrete events.
    virtual bool try_apply(const UiEvent& event) = 0;

    // Drains pending internal work until the backend is idle. Returns a
    // crash report if a crash occurred, nullopt once idle. Throws
    // SettleBudgetError when the work queue exceeds its budget.
    virtual std::optional<CrashReport> settle() = 0;

    // Evaluates a property against the current state. The driver settles
    // first. Throws UnknownPredicateError for undeclared predicate names.
    virtual bool holds(const Prop& p) = 0;

    // The run-time view-hierarchy query: candidate ids for the wildcard in
    // an app event, ordered by the backend's canonical order.
    virtual std::vector<UiId> enumerate_candidates(const AppEvent& e) = 0;

    // Brings a suspended app back to the foreground. Returns true if a
    // resume was performed, false if already foregrounded.
    virtual bool ensure_foreground() = 0;
};

} // namespace chimp
