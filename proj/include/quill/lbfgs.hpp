#pragma once

#include <cmath>
#include <cstddef>
#include <deque>

#include <Eigen/Core>

namespace quill {

struct LbfgsOptions {
    std::size_t max_iterations = 100;
    std::size_t history = 10;
    double gradient_tolerance = 1e-6; // on the max-norm of the gradient
    double armijo = 1e-4;
};

struct LbfgsResult {
    std::size_t iterations = 0;
    double value = 0.0;
    bool converged = false;
};

/// Limited-memory BFGS with backtracking Armijo line search.
/// `objective(x, grad)` returns f(x) and writes the gradient into grad.
template <typename Objective>
LbfgsResult minimize_lbfgs(Objective&& objective, Eigen::VectorXd& x,
                           const LbfgsOptions& options = {}) {
    using Vec = Eigen::VectorXd;
    const Eigen::Index n = x.size();
    Vec grad(n), next_grad(n), direction(n), next_x(n);
    double value = objective(x, grad);

    struct Pair {
        Vec s, y;
        double rho;
    };
    std::deque<Pair> memory;
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(options.history));

    LbfgsResult result;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        // two-loop recursion
        direction = -grad;
        for (std::size_t k = memory.size(); k-- > 0;) {
            const auto& p = memory[k];
            alpha(static_cast<Eigen::Index>(k)) = p.rho * p.s.dot(direction);
            direction -= alpha(static_cast<Eigen::Index>(k)) * p.y;
        }
        if (!memory.empty()) {
            const auto& last = memory.back();
            direction *= last.s.dot(last.y) / last.y.squaredNorm();
        } else {
            direction /= std::max(1.0, grad.norm());
        }
        for (std::size_t k = 0; k < memory.size(); ++k) {
            const auto& p = memory[k];
            const double beta = p.rho * p.y.dot(direction);
            direction += (alpha(static_cast<Eigen::Index>(k)) - beta) * p.s;
        }

        double slope = grad.dot(direction);
        if (slope >= 0.0) { // not a descent direction; restart from steepest descent
            memory.clear();
            direction = -grad / std::max(1.0, grad.norm());
            slope = grad.dot(direction);
        }

        double step = 1.0;
        double next_value = 0.0;
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            next_x = x + step * direction;
            next_value = objective(next_x, next_grad);
            if (std::isfinite(next_value) && next_value <= value + options.armijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        Vec s = next_x - x;
        Vec y = next_grad - grad;
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            if (memory.size() == options.history) memory.pop_front();
            memory.push_back({std::move(s), std::move(y), 1.0 / sy});
        }
        x.swap(next_x);
        grad.swap(next_grad);
        value = next_value;
        result.iterations = it + 1;
    }
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) result.converged = true;
    result.value = value;
    return result;
}

} // namespace quill
