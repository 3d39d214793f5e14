#pragma once

#include <stdexcept>
#include <string>

namespace pegasus {

// Exit-code contract used by the CLI: 2 = input/parse, 3 = infeasible budget,
// 4 = invalid parameters.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct budget_infeasible_error : std::runtime_error {
    double residual_bits;
    double budget_bits;
    budget_infeasible_error(const std::string& msg, double residual, double budget)
        : std::runtime_error(msg), residual_bits(residual), budget_bits(budget) {}
};

struct empty_graph_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct disconnected_graph_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pegasus
