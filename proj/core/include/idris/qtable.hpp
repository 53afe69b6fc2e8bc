#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "idris/rng.hpp"

namespace idris {

// State-by-action value table. Rows are materialized on first write, so
// large joint spaces cost memory only for visited states; an untouched row
// reads as the initial value with zero visits.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t actions, double initial_value = 0.0);

    std::size_t state_count() const { return states_; }
    std::size_t action_count() const { return actions_; }
    double initial_value() const { return initial_; }

    double value(std::size_t state, std::size_t action) const;
    std::span<const double> values(std::size_t state) const;
    std::uint64_t visits(std::size_t state, std::size_t action) const;
    std::uint64_t state_visits(std::size_t state) const;
    double max_value(std::size_t state) const;

    void set(std::size_t state, std::size_t action, double value);
    void add_visits(std::size_t state, std::size_t action, std::uint64_t count = 1);

    bool same_shape(const QTable& other) const;
    std::vector<std::size_t> touched_states() const;  // ascending

    friend bool operator==(const QTable& a, const QTable& b);

private:
    struct Row {
        std::vector<double> q;
        std::vector<std::uint64_t> n;
        std::uint64_t total = 0;
    };

    Row& row_for_write(std::size_t state);
    const Row* find(std::size_t state) const;
    void check(std::size_t state, std::size_t action) const;

    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    double initial_ = 0.0;
    std::vector<double> default_row_;
    std::unordered_map<std::size_t, Row> rows_;
};

// Epsilon-greedy with uniform tie-breaking. Always consumes one uniform draw
// and one index draw, so the stream position does not depend on the values.
std::size_t select_action(const QTable& table, std::size_t state, double epsilon, Rng& rng);

// One-step Q-learning update.
void q_update(QTable& table, std::size_t state, std::size_t action, double reward,
              std::size_t next_state, double alpha, double gamma, bool terminal = false);

// Entrywise mean of values and sum of visit counts.
QTable federated_average(std::span<const QTable> tables);

}  // namespace idris
