#include "idris/qtable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "idris/error.hpp"

namespace idris {

QTable::QTable(std::size_t states, std::size_t actions, double initial_value)
    : states_(states), actions_(actions), initial_(initial_value),
      default_row_(actions, initial_value) {
    if (actions == 0)
        throw ConfigError(ConfigErrorCode::validation, "sub_agents", "empty action set");
    if (states == 0) throw ConfigError(ConfigErrorCode::validation, "learning.state_dims",
                                       "empty state space");
}

void QTable::check(std::size_t state, std::size_t action) const {
    if (state >= states_ || action >= actions_) throw std::out_of_range("Q-table index out of range");
}

const QTable::Row* QTable::find(std::size_t state) const {
    const auto it = rows_.find(state);
    return it == rows_.end() ? nullptr : &it->second;
}

QTable::Row& QTable::row_for_write(std::size_t state) {
    auto [it, inserted] = rows_.try_emplace(state);
    if (inserted) {
        it->second.q = default_row_;
        it->second.n.assign(actions_, 0);
    }
    return it->second;
}

double QTable::value(std::size_t state, std::size_t action) const {
    check(state, action);
    const Row* row = find(state);
    return row ? row->q[action] : initial_;
}

std::span<const double> QTable::values(std::size_t state) const {
    check(state, 0);
    const Row* row = find(state);
    return row ? std::span<const double>(row->q) : std::span<const double>(default_row_);
}

std::uint64_t QTable::visits(std::size_t state, std::size_t action) const {
    check(state, action);
    const Row* row = find(state);
    return row ? row->n[action] : 0;
}

std::uint64_t QTable::state_visits(std::size_t state) const {
    check(state, 0);
    const Row* row = find(state);
    return row ? row->total : 0;
}

double QTable::max_value(std::size_t state) const {
    const auto v = values(state);
    return *std::max_element(v.begin(), v.end());
}

void QTable::set(std::size_t state, std::size_t action, double value) {
    check(state, action);
    row_for_write(state).q[action] = value;
}

void QTable::add_visits(std::size_t state, std::size_t action, std::uint64_t count) {
    check(state, action);
    Row& row = row_for_write(state);
    row.n[action] += count;
    row.total += count;
}

bool QTable::same_shape(const QTable& other) const {
    return states_ == other.states_ && actions_ == other.actions_;
}

std::vector<std::size_t> QTable::touched_states() const {
    std::vector<std::size_t> out;
    out.reserve(rows_.size());
    for (const auto& [s, row] : rows_) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

bool operator==(const QTable& a, const QTable& b) {
    if (!a.same_shape(b)) return false;
    const auto rows_equal = [&](const QTable& x, const QTable& y) {
        for (const auto& [s, row] : x.rows_) {
            for (std::size_t act = 0; act < x.actions_; ++act) {
                if (row.q[act] != y.value(s, act) || row.n[act] != y.visits(s, act)) return false;
            }
        }
        return true;
    };
    if (a.initial_ != b.initial_) {
        // Some row untouched in both tables would expose the differing defaults.
        std::size_t covered = a.rows_.size();
        for (const auto& entry : b.rows_) covered += a.rows_.contains(entry.first) ? 0 : 1;
        if (covered < a.states_) return false;
    }
    return rows_equal(a, b) && rows_equal(b, a);
}

std::size_t select_action(const QTable& table, std::size_t state, double epsilon, Rng& rng) {
    const auto q = table.values(state);
    const double u = uniform01(rng);
    if (u < epsilon) return uniform_index(rng, q.size());
    const double best = *std::max_element(q.begin(), q.end());
    std::size_t ties = 0;
    for (double v : q) ties += v == best ? 1 : 0;
    std::size_t pick = uniform_index(rng, ties);
    for (std::size_t a = 0; a < q.size(); ++a) {
        if (q[a] == best && pick-- == 0) return a;
    }
    return 0;
}

void q_update(QTable& table, std::size_t state, std::size_t action, double reward,
              std::size_t next_state, double alpha, double gamma, bool terminal) {
    if (!std::isfinite(reward)) throw DomainError("reward must be finite");
    const double bootstrap = terminal ? 0.0 : table.max_value(next_state);
    const double old = table.value(state, action);
    table.set(state, action, old + alpha * (reward + gamma * bootstrap - old));
    table.add_visits(state, action);
}

QTable federated_average(std::span<const QTable> tables) {
    if (tables.empty()) throw std::invalid_argument("federated averaging needs at least one table");
    const QTable& first = tables.front();
    for (const QTable& t : tables) {
        if (!t.same_shape(first))
            throw ConfigError(ConfigErrorCode::validation, "agents",
                              "federated tables differ in shape");
    }
    const double k = static_cast<double>(tables.size());
    double init_sum = 0.0;
    for (const QTable& t : tables) init_sum += t.initial_value();
    QTable out(first.state_count(), first.action_count(), init_sum / k);

    std::vector<std::size_t> states;
    for (const QTable& t : tables) {
        const auto touched = t.touched_states();
        states.insert(states.end(), touched.begin(), touched.end());
    }
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());

    for (std::size_t s : states) {
        for (std::size_t a = 0; a < first.action_count(); ++a) {
            double sum = 0.0;
            std::uint64_t n = 0;
            for (const QTable& t : tables) {
                sum += t.value(s, a);
                n += t.visits(s, a);
            }
            out.set(s, a, sum / k);
            if (n > 0) out.add_visits(s, a, n);
        }
    }
    return out;
}

}  // namespace idris
