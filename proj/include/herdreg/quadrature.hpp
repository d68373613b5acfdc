#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace herdreg {

/// Raised when the adaptive scheme hits its interval budget before reaching
/// the requested tolerance. Carries the best value available at that point.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double partial)
        : std::runtime_error(msg), partial_value(partial) {}
    double partial_value;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  ///< accumulated |S2-S1|/15 over accepted leaves
    int intervals = 0;            ///< accepted leaf intervals
};

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance
/// `abs_tol`, spending at most `max_intervals` subdivisions (2^16 by
/// default). Throws QuadratureError carrying the partial value when the
/// budget is exhausted. Discontinuities of f must be passed as segment
/// boundaries by the caller; within [a, b] f is assumed continuous.
template <class F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, double abs_tol = 1e-10,
                                  int max_intervals = 1 << 16) {
    QuadratureResult res;
    if (a == b) return res;

    struct Seg {
        double a, b, fa, fm, fb, whole, tol;
        int depth;
    };
    auto simpson = [](double a_, double b_, double fa_, double fm_, double fb_) {
        return (b_ - a_) / 6.0 * (fa_ + 4.0 * fm_ + fb_);
    };

    const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    std::vector<Seg> stack;
    stack.push_back({a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), abs_tol, 0});

    double sum = 0.0;
    int splits = 0;
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();

        const double m = 0.5 * (s.a + s.b);
        const double lm = 0.5 * (s.a + m), rm = 0.5 * (m + s.b);
        // Interval shrunk to rounding width: accept as-is.
        if (!(s.a < lm && lm < m && m < rm && rm < s.b)) {
            sum += s.whole;
            ++res.intervals;
            continue;
        }
        const double flm = f(lm), frm = f(rm);
        const double left = simpson(s.a, m, s.fa, flm, s.fm);
        const double right = simpson(m, s.b, s.fm, frm, s.fb);
        const double delta = left + right - s.whole;

        // Richardson: |delta|/15 estimates the error of left+right. Require at
        // least one split so a coincidental coarse match cannot end the whole
        // integral at depth zero.
        if (s.depth > 0 && std::abs(delta) <= 15.0 * s.tol) {
            sum += left + right + delta / 15.0;
            res.error_estimate += std::abs(delta) / 15.0;
            res.intervals += 2;
            continue;
        }
        if (++splits > max_intervals) {
            double partial = sum + left + right + delta / 15.0;
            for (const Seg& p : stack) partial += p.whole;
            throw QuadratureError("adaptive quadrature: interval budget exhausted", partial);
        }
        stack.push_back({m, s.b, s.fm, frm, s.fb, right, 0.5 * s.tol, s.depth + 1});
        stack.push_back({s.a, m, s.fa, flm, s.fm, left, 0.5 * s.tol, s.depth + 1});
    }
    res.value = sum;
    return res;
}

}  // namespace herdreg
