#include "alley/config_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace alley {

void RunConfig::validate() const {
    scenario.validate();
    if (policies.empty()) throw ConfigError("run.policies must name at least one policy");
    if (replications < 1) throw ConfigError("run.replications must be >= 1");
    if (output_format != "csv" && output_format != "json")
        throw ConfigError("run.output_format must be csv or json");
}

namespace {

struct RawValue {
    std::string text;
    int line = 0;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config key '" + path + "': " + why);
}

long long parse_int(const std::string& path, const RawValue& v) {
    long long out = 0;
    auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec != std::errc() || p != v.text.data() + v.text.size())
        fail(path, "expected an integer, got '" + v.text + "'");
    return out;
}

double parse_real(const std::string& path, const RawValue& v) {
    try {
        std::size_t used = 0;
        double out = std::stod(v.text, &used);
        if (used != v.text.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        fail(path, "expected a number, got '" + v.text + "'");
    }
}

bool parse_bool(const std::string& path, const RawValue& v) {
    if (v.text == "true") return true;
    if (v.text == "false") return false;
    fail(path, "expected true or false, got '" + v.text + "'");
}

std::string parse_string(const std::string& path, const RawValue& v) {
    if (v.text.size() >= 2 && v.text.front() == '"' && v.text.back() == '"')
        return v.text.substr(1, v.text.size() - 2);
    fail(path, "expected a quoted string, got '" + v.text + "'");
}

std::vector<RawValue> parse_array(const std::string& path, const RawValue& v) {
    if (v.text.size() < 2 || v.text.front() != '[' || v.text.back() != ']')
        fail(path, "expected an array [..], got '" + v.text + "'");
    std::vector<RawValue> items;
    std::string body = v.text.substr(1, v.text.size() - 2);
    std::string current;
    for (char c : body) {
        if (c == ',') {
            items.push_back({trim(current), v.line});
            current.clear();
        } else {
            current += c;
        }
    }
    if (!trim(current).empty()) items.push_back({trim(current), v.line});
    return items;
}

struct Document {
    // section -> key -> value, with consumption tracking for fail-closed
    // unknown-key detection.
    std::map<std::string, std::map<std::string, RawValue>> sections;
    std::map<std::string, std::set<std::string>> consumed;

    std::optional<RawValue> take(const std::string& section, const std::string& key) {
        auto s = sections.find(section);
        if (s == sections.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        consumed[section].insert(key);
        return k->second;
    }

    void reject_unknown() const {
        for (const auto& [section, keys] : sections) {
            auto c = consumed.find(section);
            for (const auto& [key, value] : keys) {
                if (c == consumed.end() || !c->second.count(key))
                    throw ConfigError("unknown config key '" + section + "." + key + "' (line " +
                                      std::to_string(value.line) + ")");
            }
        }
    }
};

Document tokenize(const std::string& text) {
    static const std::set<std::string> kSections = {"scenario", "comms", "utility", "policy",
                                                    "run"};
    Document doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!kSections.count(section))
                throw ConfigError("unknown config section '" + section + "' (line " +
                                  std::to_string(line_no) + ")");
            doc.sections[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        if (!doc.sections[section].emplace(key, RawValue{value, line_no}).second)
            throw ConfigError("duplicate config key '" + section + "." + key + "'");
    }
    return doc;
}

std::vector<int> int_array(const std::string& path, const RawValue& v) {
    std::vector<int> out;
    for (const RawValue& item : parse_array(path, v))
        out.push_back(static_cast<int>(parse_int(path, item)));
    return out;
}

Eigen::Vector3d mixture(const std::string& path, const RawValue& v) {
    std::vector<RawValue> items = parse_array(path, v);
    if (items.size() != 3) fail(path, "expected three probabilities [F, W, B]");
    Eigen::Vector3d m;
    for (int i = 0; i < 3; ++i) m[i] = parse_real(path, items[i]);
    return m;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    Document doc = tokenize(text);
    RunConfig config;
    Scenario& sc = config.scenario;

    bool have_length = false;
    if (auto v = doc.take("scenario", "length_L")) {
        sc.config.length = static_cast<int>(parse_int("scenario.length_L", *v));
        have_length = true;
    }
    if (auto v = doc.take("scenario", "collision_cost_k"))
        sc.config.collision_cost = static_cast<int>(parse_int("scenario.collision_cost_k", *v));
    if (auto v = doc.take("scenario", "sensing_range_D"))
        sc.config.sensing_range = static_cast<int>(parse_int("scenario.sensing_range_D", *v));
    std::optional<int> comm_range;
    if (auto v = doc.take("scenario", "comm_range"))
        comm_range = static_cast<int>(parse_int("scenario.comm_range", *v));
    std::optional<int> horizon;
    if (auto v = doc.take("scenario", "safety_horizon"))
        horizon = static_cast<int>(parse_int("scenario.safety_horizon", *v));
    if (auto v = doc.take("scenario", "east")) sc.east_positions = int_array("scenario.east", *v);
    if (auto v = doc.take("scenario", "west")) sc.west_positions = int_array("scenario.west", *v);
    if (auto v = doc.take("scenario", "seed"))
        sc.seed = static_cast<std::uint64_t>(parse_int("scenario.seed", *v));

    auto types_raw = doc.take("scenario", "types");
    auto prior_raw = doc.take("scenario", "type_prior");
    if (types_raw && prior_raw)
        throw ConfigError("scenario.types and scenario.type_prior are mutually exclusive");
    if (types_raw) {
        std::vector<VehicleType> types;
        for (const RawValue& item : parse_array("scenario.types", *types_raw)) {
            std::string t = parse_string("scenario.types", item);
            if (t == "UR") types.push_back(VehicleType::Unselfish);
            else if (t == "SR") types.push_back(VehicleType::Selfish);
            else fail("scenario.types", "expected \"UR\" or \"SR\", got '" + t + "'");
        }
        sc.types = std::move(types);
    }
    if (prior_raw) {
        sc.type_prior_unselfish = parse_real("scenario.type_prior", *prior_raw);
        if (sc.type_prior_unselfish < 0.0 || sc.type_prior_unselfish > 1.0)
            fail("scenario.type_prior", "must be within [0,1]");
    }

    // Defaults that depend on the geometry.
    sc.config.comm_range = comm_range.value_or(2 * sc.config.sensing_range);
    sc.config.safety_horizon = horizon.value_or(10 * sc.config.length);
    if (have_length) sc.policy.utility = UtilityParams::for_length(sc.config.length);

    if (auto v = doc.take("comms", "loss_probability")) {
        sc.comm_cfg.loss_probability = parse_real("comms.loss_probability", *v);
        if (sc.comm_cfg.loss_probability < 0.0 || sc.comm_cfg.loss_probability > 1.0)
            fail("comms.loss_probability", "must be within [0,1]");
    }
    if (auto v = doc.take("comms", "relay_enabled"))
        sc.comm_cfg.relay_enabled = parse_bool("comms.relay_enabled", *v);
    if (auto v = doc.take("comms", "max_hops"))
        sc.comm_cfg.max_hops = static_cast<int>(parse_int("comms.max_hops", *v));

    if (auto v = doc.take("utility", "plateau_payoff"))
        sc.policy.utility.plateau = parse_real("utility.plateau_payoff", *v);
    if (auto v = doc.take("utility", "threshold_UR"))
        sc.policy.utility.threshold_unselfish = parse_real("utility.threshold_UR", *v);
    if (auto v = doc.take("utility", "threshold_SR"))
        sc.policy.utility.threshold_selfish = parse_real("utility.threshold_SR", *v);
    if (auto v = doc.take("utility", "slope"))
        sc.policy.utility.slope = parse_real("utility.slope", *v);

    if (auto v = doc.take("policy", "decision_noise")) {
        sc.policy.decision_noise = parse_real("policy.decision_noise", *v);
        if (sc.policy.decision_noise < 0.0 || sc.policy.decision_noise > 1.0)
            fail("policy.decision_noise", "must be within [0,1]");
    }
    if (auto v = doc.take("policy", "standoff_slots")) {
        sc.config.standoff_slots = parse_real("policy.standoff_slots", *v);
        if (sc.config.standoff_slots < 0.0) fail("policy.standoff_slots", "must be >= 0");
    }
    if (auto v = doc.take("policy", "prior_unselfish")) {
        sc.policy.default_prior.p_unselfish = parse_real("policy.prior_unselfish", *v);
        if (sc.policy.default_prior.p_unselfish < 0.0 ||
            sc.policy.default_prior.p_unselfish > 1.0)
            fail("policy.prior_unselfish", "must be within [0,1]");
    }
    if (auto v = doc.take("policy", "mix_UR"))
        sc.policy.default_prior.if_unselfish.probs = mixture("policy.mix_UR", *v);
    if (auto v = doc.take("policy", "mix_SR"))
        sc.policy.default_prior.if_selfish.probs = mixture("policy.mix_SR", *v);
    if (!sc.policy.default_prior.if_unselfish.is_valid())
        fail("policy.mix_UR", "probabilities must be nonnegative and sum to 1");
    if (!sc.policy.default_prior.if_selfish.is_valid())
        fail("policy.mix_SR", "probabilities must be nonnegative and sum to 1");

    if (auto v = doc.take("run", "policies")) {
        for (const RawValue& item : parse_array("run.policies", *v)) {
            std::string name = parse_string("run.policies", item);
            auto policy = policy_from_string(name);
            if (!policy) fail("run.policies", "unknown policy '" + name + "'");
            config.policies.push_back(*policy);
        }
    }
    if (auto v = doc.take("run", "replications"))
        config.replications = static_cast<int>(parse_int("run.replications", *v));
    if (auto v = doc.take("run", "output_path"))
        config.output_path = parse_string("run.output_path", *v);
    if (auto v = doc.take("run", "output_format"))
        config.output_format = parse_string("run.output_format", *v);
    if (auto v = doc.take("run", "poa")) config.want_poa = parse_bool("run.poa", *v);

    doc.reject_unknown();

    try {
        config.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return config;
}

namespace {

std::string real_repr(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string render_config(const RunConfig& config) {
    const Scenario& sc = config.scenario;
    std::ostringstream out;
    out << "[scenario]\n";
    out << "length_L = " << sc.config.length << "\n";
    out << "collision_cost_k = " << sc.config.collision_cost << "\n";
    out << "sensing_range_D = " << sc.config.sensing_range << "\n";
    out << "comm_range = " << sc.config.comm_range << "\n";
    out << "safety_horizon = " << sc.config.safety_horizon << "\n";
    auto list = [&](const std::vector<int>& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += (i ? ", " : "") + std::to_string(xs[i]);
        return s + "]";
    };
    out << "east = " << list(sc.east_positions) << "\n";
    out << "west = " << list(sc.west_positions) << "\n";
    if (sc.types) {
        out << "types = [";
        for (std::size_t i = 0; i < sc.types->size(); ++i)
            out << (i ? ", " : "") << '"' << to_string((*sc.types)[i]) << '"';
        out << "]\n";
    } else {
        out << "type_prior = " << real_repr(sc.type_prior_unselfish) << "\n";
    }
    out << "seed = " << sc.seed << "\n";
    out << "\n[comms]\n";
    out << "loss_probability = " << real_repr(sc.comm_cfg.loss_probability) << "\n";
    out << "relay_enabled = " << (sc.comm_cfg.relay_enabled ? "true" : "false") << "\n";
    out << "max_hops = " << sc.comm_cfg.max_hops << "\n";
    out << "\n[utility]\n";
    out << "plateau_payoff = " << real_repr(sc.policy.utility.plateau) << "\n";
    out << "threshold_UR = " << real_repr(sc.policy.utility.threshold_unselfish) << "\n";
    out << "threshold_SR = " << real_repr(sc.policy.utility.threshold_selfish) << "\n";
    out << "slope = " << real_repr(sc.policy.utility.slope) << "\n";
    out << "\n[policy]\n";
    out << "decision_noise = " << real_repr(sc.policy.decision_noise) << "\n";
    out << "standoff_slots = " << real_repr(sc.config.standoff_slots) << "\n";
    out << "prior_unselfish = " << real_repr(sc.policy.default_prior.p_unselfish) << "\n";
    auto mix = [&](const MixedStrategy& m) {
        return "[" + real_repr(m.probs[0]) + ", " + real_repr(m.probs[1]) + ", " +
               real_repr(m.probs[2]) + "]";
    };
    out << "mix_UR = " << mix(sc.policy.default_prior.if_unselfish) << "\n";
    out << "mix_SR = " << mix(sc.policy.default_prior.if_selfish) << "\n";
    out << "\n[run]\n";
    out << "policies = [";
    for (std::size_t i = 0; i < config.policies.size(); ++i)
        out << (i ? ", " : "") << '"' << to_string(config.policies[i]) << '"';
    out << "]\n";
    out << "replications = " << config.replications << "\n";
    out << "output_path = \"" << config.output_path << "\"\n";
    out << "output_format = \"" << config.output_format << "\"\n";
    out << "poa = " << (config.want_poa ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace alley
