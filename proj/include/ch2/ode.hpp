#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "ch2/errors.hpp"

namespace ch2::ode {

enum class Method {
    RK4_FIXED,          // classic RK4 with step h_init
    ADAPTIVE_EMBEDDED,  // Dormand-Prince 4(5) with PI step-size control
};

/// Step-size and tolerance settings for integrate().
struct IntegratorConfig {
    Method method = Method::ADAPTIVE_EMBEDDED;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 5e-2;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    long max_steps = 2'000'000;
    double blowup_guard = 1e12;  // abort once any |state component| exceeds this

    void validate() const;  // throws VALIDATION_ERROR
};

using Rhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

/// Explicit first-order initial-value problem y' = rhs(t, y), y(t0) = y0,
/// integrated forward to t_end.
struct IvpProblem {
    std::size_t dimension = 0;
    Rhs rhs;
    double t0 = 0.0;
    std::vector<double> y0;
    double t_end = 0.0;

    void validate() const;
};

enum class EventDirection { ANY, RISING, FALLING };

using EventFn = std::function<double(double t, const std::vector<double>& y)>;

/// Zero-crossing detector evaluated on accepted steps. A crossing in the
/// allowed direction is located on the dense interpolant by bisection.
struct EventSpec {
    EventFn event_fn;
    EventDirection direction = EventDirection::ANY;
    bool terminal = true;
    double root_tol = 1e-10;
};

enum class Termination {
    REACHED_T_END,
    EVENT,
    BLOWUP_GUARD,
    STEP_UNDERFLOW,
    MAX_STEPS,
};

const char* termination_name(Termination t);

struct EventHit {
    std::size_t event_index = 0;
    double time = 0.0;
    std::vector<double> state;
};

/// Accepted-step record of one integration run. Node derivatives are kept so
/// states can be re-evaluated anywhere in range by cubic Hermite interpolation.
class Trajectory {
  public:
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> derivs;
    Termination termination = Termination::REACHED_T_END;
    std::optional<double> event_time;
    std::optional<std::vector<double>> event_state;
    std::vector<EventHit> event_hits;  // includes non-terminal crossings

    std::size_t size() const { return times.size(); }
    std::size_t dimension() const { return states.empty() ? 0 : states.front().size(); }
    double t_front() const { return times.front(); }
    double t_back() const { return times.back(); }
    bool in_range(double t) const;

    /// Cubic Hermite evaluation at any t in [t_front, t_back].
    void dense_eval(double t, std::vector<double>& out) const;
    std::vector<double> state_at(double t) const;
};

/// Integrate problem forward, recording every accepted step. Preconditions are
/// validated; a nonfinite right-hand side at (t0, y0) throws NONFINITE_RHS.
Trajectory integrate(const IvpProblem& problem, const IntegratorConfig& config,
                     const std::vector<EventSpec>& events = {});

/// Locate a sign change of event.event_fn inside one bracketing step by
/// bisection on the dense interpolant. dense_eval(t, out) must fill the state
/// at t for t in [t_lo, t_hi]. Throws NO_BRACKET when the endpoint signs do
/// not bracket a crossing in the allowed direction.
double locate_event(double t_lo, const std::vector<double>& y_lo, double t_hi,
                    const std::vector<double>& y_hi, const EventSpec& event,
                    const std::function<void(double, std::vector<double>&)>& dense_eval);

}  // namespace ch2::ode
