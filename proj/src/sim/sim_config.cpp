#include "dnurbs/sim_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <utility>

#include "dnurbs/errors.hpp"

namespace dnurbs::sim {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view tok) {
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("not a number: '" + std::string(tok) + "'");
    return v;
}

int to_int(std::string_view tok) {
    int v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("not an integer: '" + std::string(tok) + "'");
    return v;
}

std::vector<std::string> tokens(const std::string& s) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

std::vector<double> numbers(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : tokens(s)) out.push_back(to_double(tok));
    return out;
}

double single_number(const std::string& s) {
    const auto v = numbers(s);
    if (v.size() != 1) throw ConfigError("expected one number, got '" + s + "'");
    return v.front();
}

std::vector<Vec3> parse_points(const std::string& s) {
    std::vector<Vec3> pts;
    std::istringstream in(s);
    for (std::string item; std::getline(in, item, ';');) {
        if (trim(item).empty()) continue;
        const auto v = numbers(item);
        if (v.size() != 3) throw ConfigError("control point needs 3 coordinates: '" + trim(item) + "'");
        pts.emplace_back(v[0], v[1], v[2]);
    }
    return pts;
}

Coord parse_coord(char c) {
    switch (c) {
        case 'x': return Coord::x;
        case 'y': return Coord::y;
        case 'z': return Coord::z;
        case 'w': return Coord::w;
    }
    throw ConfigError(std::string("unknown coordinate '") + c + "' (expected x, y, z or w)");
}

std::vector<PinnedDof> parse_pins(const std::string& s) {
    std::vector<PinnedDof> out;
    for (const auto& tok : tokens(s)) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos || colon + 1 == tok.size()) {
            throw ConfigError("pin entries look like <control>:<coords>, got '" + tok + "'");
        }
        const int control = to_int(std::string_view(tok).substr(0, colon));
        for (char c : tok.substr(colon + 1)) out.push_back({control, parse_coord(c)});
    }
    return out;
}

ConstraintRow parse_row(const std::string& s) {
    const auto bar = s.find('|');
    if (bar == std::string::npos) throw ConfigError("constraint rows look like 'a_0 ... a_n | d'");
    ConstraintRow row;
    row.a = numbers(s.substr(0, bar));
    row.d = single_number(s.substr(bar + 1));
    return row;
}

void apply_key(SimConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "order") cfg.order = to_int(trim(value));
    else if (key == "knots") cfg.knots = numbers(value);
    else if (key == "points") cfg.points = parse_points(value);
    else if (key == "weights") cfg.weights = numbers(value);
    else if (key == "velocity") cfg.velocity = numbers(value);
    else if (key == "alpha") cfg.params.alpha = single_number(value);
    else if (key == "beta") cfg.params.beta = single_number(value);
    else if (key == "mu") cfg.params.mu = single_number(value);
    else if (key == "gamma") cfg.params.gamma = single_number(value);
    else if (key == "g") cfg.params.g = single_number(value);
    else if (key == "dt") cfg.dt = single_number(value);
    else if (key == "steps") cfg.steps = to_int(trim(value));
    else if (key == "quadrature") cfg.quadrature_points = to_int(trim(value));
    else if (key == "pin") {
        const auto p = parse_pins(value);
        cfg.pins.insert(cfg.pins.end(), p.begin(), p.end());
    } else if (key == "clear_pins") {
        cfg.pins.clear();
    } else if (key == "constraint") cfg.rows.push_back(parse_row(value));
    else if (key == "weight_policy") cfg.policy = parse_weight_policy(trim(value));
    else if (key == "track_u") cfg.track_u = single_number(value);
    else if (key == "solver_tol") cfg.solver.tol = single_number(value);
    else if (key == "solver_max_iter") cfg.solver.max_iter = to_int(trim(value));
    else if (key == "trace") cfg.trace_path = trim(value);
    else if (key == "final_state") cfg.state_path = trim(value);
    else throw ConfigError("unknown key '" + key + "'");
}

}  // namespace

KnotVector SimConfig::knot_vector() const { return KnotVector(knots, order); }

GeneralizedState SimConfig::initial_state() const { return GeneralizedState(points, weights); }

Eigen::VectorXd SimConfig::initial_velocity() const {
    const auto n = static_cast<Eigen::Index>(4 * points.size());
    if (velocity.empty()) return Eigen::VectorXd::Zero(n);
    if (static_cast<Eigen::Index>(velocity.size()) != n) throw ConfigError("velocity must have 4m entries");
    return Eigen::Map<const Eigen::VectorXd>(velocity.data(), n);
}

void SimConfig::validate() const {
    const KnotVector kv = knot_vector();
    const int m = kv.num_basis();
    if (static_cast<int>(points.size()) != m) {
        throw ConfigError("knot vector defines " + std::to_string(m) + " controls but " +
                          std::to_string(points.size()) + " points were given");
    }
    if (weights.size() != points.size()) throw ConfigError("need one weight per control point");
    initial_state();
    initial_velocity();
    params.validate();
    solver.validate();
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (quadrature_points < 0) throw ConfigError("quadrature must be >= 1 (or 0 for the default)");
    for (const auto& pin : pins) {
        if (pin.control < 0 || pin.control >= m) {
            throw ConfigError("pinned control " + std::to_string(pin.control) + " out of range");
        }
    }
    for (const auto& row : rows) {
        if (static_cast<int>(row.a.size()) != 4 * m) throw ConfigError("constraint row needs 4m coefficients");
    }
    if (!(track_u >= kv.domain_begin() && track_u <= kv.domain_end())) {
        throw ConfigError("track_u outside the curve's parameter domain");
    }
    partition_elements(kv);
}

ConstraintSpec SimConfig::constraint_spec() const {
    const GeneralizedState s0 = initial_state();
    ConstraintSpec spec(s0.num_dofs());
    std::set<std::pair<int, int>> seen;
    auto add_pin = [&](int control, Coord c) {
        if (seen.insert({control, static_cast<int>(c)}).second) {
            spec.pin(control, c, s0.p()[4 * control + static_cast<int>(c)]);
        }
    };
    for (const auto& pin : pins) add_pin(pin.control, pin.coord);
    if (policy == WeightPolicy::pinned) {
        for (int i = 0; i < s0.num_controls(); ++i) add_pin(i, Coord::w);
    }
    for (const auto& row : rows) {
        spec.add_row(Eigen::Map<const Eigen::VectorXd>(row.a.data(), static_cast<Eigen::Index>(row.a.size())),
                     row.d);
    }
    return spec;
}

SimConfig SimConfig::wire_preset() {
    SimConfig cfg;
    cfg.order = 4;
    cfg.knots = {0, 0, 0, 0, 0.25, 0.50, 0.75, 1, 1, 1, 1};
    cfg.points = {{-5.00, 5, 0}, {-4.17, 5, 0}, {-2.50, 5, 0}, {0.00, 5, 0},
                  {2.50, 5, 0},  {4.17, 5, 0},  {5.00, 5, 0}};
    cfg.weights.assign(7, 1.0);
    cfg.params = PhysicsParams{30.0, 0.0, 35.0, 10.0, 9.8};
    cfg.dt = 0.008;
    cfg.steps = 1000;
    cfg.quadrature_points = 10;
    for (int i : {0, 1, 2, 4, 5, 6}) {
        for (Coord c : {Coord::x, Coord::y, Coord::z, Coord::w}) cfg.pins.push_back({i, c});
    }
    cfg.policy = WeightPolicy::reset_to_initial;
    cfg.track_u = 0.5;
    return cfg;
}

SimConfig parse_config(std::istream& in, SimConfig base) {
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        try {
            apply_key(base, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

SimConfig load_config(const std::string& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return parse_config(in, std::move(base));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::vector<double> greville_abscissae(const KnotVector& kv) {
    const int k = kv.order();
    std::vector<double> out(kv.num_basis());
    for (int i = 0; i < kv.num_basis(); ++i) {
        double s = 0.0;
        for (int j = 1; j < k; ++j) s += kv[i + j];
        out[i] = k > 1 ? s / (k - 1) : 0.5 * (kv[i] + kv[i + 1]);
    }
    return out;
}

SimConfig straight_wire(int num_controls, int order, double half_length, double height) {
    const KnotVector kv = KnotVector::open_uniform(num_controls, order);
    SimConfig cfg = SimConfig::wire_preset();
    cfg.order = order;
    cfg.knots = kv.knots();
    cfg.points.clear();
    for (double g : greville_abscissae(kv)) cfg.points.emplace_back(-half_length + 2.0 * half_length * g, height, 0.0);
    cfg.weights.assign(num_controls, 1.0);
    cfg.velocity.clear();
    cfg.pins.clear();
    for (int i = 0; i < order - 1; ++i) {
        for (Coord c : {Coord::x, Coord::y, Coord::z, Coord::w}) {
            cfg.pins.push_back({i, c});
            cfg.pins.push_back({num_controls - 1 - i, c});
        }
    }
    return cfg;
}

}  // namespace dnurbs::sim
