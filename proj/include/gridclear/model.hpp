#pragma once

// Network case model: ingestion and validation of the JSON case format,
// DC admittance construction, and the multi-area topology (tie-lines,
// shared buses, per-area views).

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gridclear/common.hpp"

namespace gridclear {

struct Bus {
    std::string id;
    std::string area_id;
    std::vector<double> demand;  // MW, one entry per hour
};

struct Branch {
    std::string id;  // optional in input; autogenerated "br<i>" when absent
    std::string from_bus;
    std::string to_bus;
    double reactance = 0.0;   // per-unit on base_mva
    double flow_limit = 0.0;  // MW, symmetric
};

struct GeneratorParams {
    std::string id;  // optional in input; autogenerated "g<i>" when absent
    std::string bus_id;
    double p_min = 0.0;
    double p_max = 0.0;
    double p_su_max = 0.0;  // max output on the first online period
    double p_sd_max = 0.0;  // max output on the last online period
    double ramp_up = 0.0;   // MW per interval
    double ramp_down = 0.0;
    int min_up = 1;
    int min_down = 1;
    int cold_start_time = 0;  // offline intervals below which a restart is hot
    double cost_q = 0.0;      // $/MW^2 h
    double cost_l = 0.0;      // $/MWh
    double cost_noload = 0.0;
    double cost_startup = 0.0;
    double cost_hot_startup = 0.0;
    double cost_shutdown = 0.0;
    bool initial_status_on = false;
    int initial_status_duration = 1;  // intervals already spent in the initial state
    std::optional<double> initial_output;  // total MW at t=0; defaults to p_min when on
};

struct Area {
    std::string id;
};

struct NetworkCase {
    int horizon = 0;
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<GeneratorParams> generators;
    std::vector<Area> areas;

    int bus_index(const std::string& id) const {
        for (std::size_t i = 0; i < buses.size(); ++i)
            if (buses[i].id == id) return static_cast<int>(i);
        return -1;
    }
    int area_index(const std::string& id) const {
        for (std::size_t i = 0; i < areas.size(); ++i)
            if (areas[i].id == id) return static_cast<int>(i);
        return -1;
    }

    /// Output above minimum at t=0 (the ramp anchor for the first interval).
    double initial_p_above(int g) const {
        const auto& gen = generators[static_cast<std::size_t>(g)];
        if (!gen.initial_status_on) return 0.0;
        const double total = gen.initial_output.value_or(gen.p_min);
        return std::max(0.0, total - gen.p_min);
    }
};

/// One market operator's slice of the system. `view_buses` is the angle
/// space of the area subproblem: internal buses first, then buses just across
/// a tie-line, both in case order.
struct AreaView {
    std::string area_id;
    std::vector<int> internal_buses;
    std::vector<int> external_buses;
    std::vector<int> tie_lines;          // branch indices, ascending
    std::vector<int> internal_branches;  // branch indices, ascending
    std::vector<int> generators;         // generator indices on internal buses
    std::vector<int> view_buses;         // internal ++ external

    bool contains_view_bus(int bus) const {
        return std::find(view_buses.begin(), view_buses.end(), bus) != view_buses.end();
    }
    int view_pos(int bus) const {
        auto it = std::find(view_buses.begin(), view_buses.end(), bus);
        return it == view_buses.end() ? -1 : static_cast<int>(it - view_buses.begin());
    }
};

/// Full multi-area decomposition: per-area views plus the global consensus
/// index sets (shared buses ascending by id, tie-lines ascending by index).
struct AreaPartition {
    std::vector<AreaView> views;
    std::vector<int> shared_buses;
    std::vector<int> tie_lines;
    std::vector<std::vector<int>> areas_of_shared;  // per shared bus: area indices containing it

    int shared_pos(int bus) const {
        auto it = std::find(shared_buses.begin(), shared_buses.end(), bus);
        return it == shared_buses.end() ? -1 : static_cast<int>(it - shared_buses.begin());
    }
    int tie_pos(int branch) const {
        auto it = std::find(tie_lines.begin(), tie_lines.end(), branch);
        return it == tie_lines.end() ? -1 : static_cast<int>(it - tie_lines.begin());
    }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    return j.get<double>();
}

inline int require_int(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
    return j.get<int>();
}

inline std::string require_string(const nlohmann::json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw ParseError(path + ": expected a string id");
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                           const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path + "." + key + ": missing");
    return *it;
}

}  // namespace detail

/// Structural validation of an already-parsed case. Throws ValidationError
/// with a field path on the first problem found.
inline void validate_case(const NetworkCase& cs) {
    if (cs.horizon < 1) throw ValidationError("horizon: must be >= 1");
    if (!(cs.base_mva > 0)) throw ValidationError("base_mva: must be > 0");
    if (cs.buses.empty()) throw ValidationError("buses: empty");
    if (cs.areas.empty()) throw ValidationError("areas: empty");

    std::set<std::string> bus_ids, area_ids, gen_ids, branch_ids;
    for (std::size_t i = 0; i < cs.areas.size(); ++i) {
        if (!area_ids.insert(cs.areas[i].id).second)
            throw ValidationError("areas[" + std::to_string(i) + "].id: duplicate '" +
                                  cs.areas[i].id + "'");
    }
    for (std::size_t i = 0; i < cs.buses.size(); ++i) {
        const auto& b = cs.buses[i];
        const std::string path = "buses[" + std::to_string(i) + "]";
        if (!bus_ids.insert(b.id).second)
            throw ValidationError(path + ".id: duplicate '" + b.id + "'");
        if (!area_ids.count(b.area_id))
            throw ValidationError(path + ".area_id: unknown area '" + b.area_id + "'");
        if (static_cast<int>(b.demand.size()) != cs.horizon)
            throw ValidationError(path + ".demand: length " + std::to_string(b.demand.size()) +
                                  " != horizon " + std::to_string(cs.horizon));
        for (std::size_t t = 0; t < b.demand.size(); ++t)
            if (b.demand[t] < 0)
                throw ValidationError(path + ".demand[" + std::to_string(t) + "]: negative");
    }
    for (std::size_t i = 0; i < cs.branches.size(); ++i) {
        const auto& br = cs.branches[i];
        const std::string path = "branches[" + std::to_string(i) + "]";
        if (!branch_ids.insert(br.id).second)
            throw ValidationError(path + ".id: duplicate '" + br.id + "'");
        if (!bus_ids.count(br.from_bus))
            throw ValidationError(path + ".from_bus: unknown bus '" + br.from_bus + "'");
        if (!bus_ids.count(br.to_bus))
            throw ValidationError(path + ".to_bus: unknown bus '" + br.to_bus + "'");
        if (br.from_bus == br.to_bus)
            throw ValidationError(path + ": from_bus equals to_bus");
        if (!(br.reactance > 0))
            throw ValidationError(path + ".reactance: must be > 0");
        if (!(br.flow_limit > 0))
            throw ValidationError(path + ".flow_limit: must be > 0");
    }
    for (std::size_t i = 0; i < cs.generators.size(); ++i) {
        const auto& g = cs.generators[i];
        const std::string path = "generators[" + std::to_string(i) + "]";
        if (!gen_ids.insert(g.id).second)
            throw ValidationError(path + ".id: duplicate '" + g.id + "'");
        if (!bus_ids.count(g.bus_id))
            throw ValidationError(path + ".bus_id: unknown bus '" + g.bus_id + "'");
        if (g.p_min < 0 || g.p_min > g.p_max)
            throw ValidationError(path + ": requires 0 <= p_min <= p_max");
        if (g.p_su_max < g.p_min || g.p_su_max > g.p_max)
            throw ValidationError(path + ".p_su_max: must lie in [p_min, p_max]");
        if (g.p_sd_max < g.p_min || g.p_sd_max > g.p_max)
            throw ValidationError(path + ".p_sd_max: must lie in [p_min, p_max]");
        if (g.ramp_up < 0 || g.ramp_down < 0)
            throw ValidationError(path + ": ramp rates must be >= 0");
        if (g.min_up < 1 || g.min_down < 1)
            throw ValidationError(path + ": min_up and min_down must be >= 1");
        if (g.cold_start_time < 0)
            throw ValidationError(path + ".cold_start_time: negative");
        if (g.cost_q < 0)
            throw ValidationError(path + ".cost_q: must be >= 0");
        if (g.cost_hot_startup > g.cost_startup)
            throw ValidationError(path + ".cost_hot_startup: exceeds cost_startup");
        if (g.initial_status_duration < 0)
            throw ValidationError(path + ".initial_status_duration: negative");
        if (g.initial_output) {
            const double p0 = *g.initial_output;
            if (g.initial_status_on) {
                if (p0 < g.p_min - 1e-9 || p0 > g.p_max + 1e-9)
                    throw ValidationError(path + ".initial_output: outside [p_min, p_max]");
            } else if (p0 != 0.0) {
                throw ValidationError(path + ".initial_output: nonzero while offline");
            }
        }
    }

    // Every area must own at least one bus.
    for (const auto& a : cs.areas) {
        bool found = false;
        for (const auto& b : cs.buses)
            if (b.area_id == a.id) { found = true; break; }
        if (!found) throw ValidationError("areas: area '" + a.id + "' contains no buses");
    }

    // Branch graph must be connected.
    if (cs.buses.size() > 1) {
        std::vector<int> parent(cs.buses.size());
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        std::function<int(int)> find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] =
                    parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        for (const auto& br : cs.branches) {
            int a = find(cs.bus_index(br.from_bus));
            int b = find(cs.bus_index(br.to_bus));
            if (a != b) parent[static_cast<std::size_t>(a)] = b;
        }
        const int root = find(0);
        for (std::size_t i = 1; i < cs.buses.size(); ++i)
            if (find(static_cast<int>(i)) != root)
                throw ValidationError("branches: graph is disconnected (bus '" +
                                      cs.buses[i].id + "' unreachable)");
    }
}

/// Parse a case from JSON text. Field names follow the canonical format;
/// optional `id` on branches/generators defaults to an index-based label.
inline NetworkCase parse_case(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("case: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("case: top level must be an object");

    NetworkCase cs;
    cs.horizon = detail::require_int(detail::require_field(j, "horizon", "case"), "horizon");
    cs.base_mva = detail::require_number(detail::require_field(j, "base_mva", "case"), "base_mva");

    const auto& areas = detail::require_field(j, "areas", "case");
    if (!areas.is_array()) throw ParseError("areas: expected an array");
    for (std::size_t i = 0; i < areas.size(); ++i) {
        const std::string path = "areas[" + std::to_string(i) + "]";
        Area a;
        if (areas[i].is_string())
            a.id = areas[i].get<std::string>();
        else if (areas[i].is_object())
            a.id = detail::require_string(detail::require_field(areas[i], "id", path), path + ".id");
        else
            throw ParseError(path + ": expected a string or object");
        cs.areas.push_back(std::move(a));
    }

    const auto& buses = detail::require_field(j, "buses", "case");
    if (!buses.is_array()) throw ParseError("buses: expected an array");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string path = "buses[" + std::to_string(i) + "]";
        const auto& bj = buses[i];
        if (!bj.is_object()) throw ParseError(path + ": expected an object");
        Bus b;
        b.id = detail::require_string(detail::require_field(bj, "id", path), path + ".id");
        b.area_id =
            detail::require_string(detail::require_field(bj, "area_id", path), path + ".area_id");
        const auto& dem = detail::require_field(bj, "demand", path);
        if (!dem.is_array()) throw ParseError(path + ".demand: expected an array");
        for (std::size_t t = 0; t < dem.size(); ++t)
            b.demand.push_back(detail::require_number(
                dem[t], path + ".demand[" + std::to_string(t) + "]"));
        cs.buses.push_back(std::move(b));
    }

    const auto& branches = detail::require_field(j, "branches", "case");
    if (!branches.is_array()) throw ParseError("branches: expected an array");
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const std::string path = "branches[" + std::to_string(i) + "]";
        const auto& bj = branches[i];
        if (!bj.is_object()) throw ParseError(path + ": expected an object");
        Branch br;
        br.id = bj.contains("id") ? detail::require_string(bj["id"], path + ".id")
                                  : "br" + std::to_string(i);
        br.from_bus =
            detail::require_string(detail::require_field(bj, "from_bus", path), path + ".from_bus");
        br.to_bus =
            detail::require_string(detail::require_field(bj, "to_bus", path), path + ".to_bus");
        br.reactance = detail::require_number(detail::require_field(bj, "reactance", path),
                                              path + ".reactance");
        br.flow_limit = detail::require_number(detail::require_field(bj, "flow_limit", path),
                                               path + ".flow_limit");
        cs.branches.push_back(std::move(br));
    }

    const auto& gens = detail::require_field(j, "generators", "case");
    if (!gens.is_array()) throw ParseError("generators: expected an array");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string path = "generators[" + std::to_string(i) + "]";
        const auto& gj = gens[i];
        if (!gj.is_object()) throw ParseError(path + ": expected an object");
        GeneratorParams g;
        g.id = gj.contains("id") ? detail::require_string(gj["id"], path + ".id")
                                 : "g" + std::to_string(i);
        g.bus_id =
            detail::require_string(detail::require_field(gj, "bus_id", path), path + ".bus_id");
        auto num = [&](const char* k) {
            return detail::require_number(detail::require_field(gj, k, path),
                                          path + "." + k);
        };
        auto inum = [&](const char* k) {
            return detail::require_int(detail::require_field(gj, k, path), path + "." + k);
        };
        g.p_min = num("p_min");
        g.p_max = num("p_max");
        g.p_su_max = num("p_su_max");
        g.p_sd_max = num("p_sd_max");
        g.ramp_up = num("ramp_up");
        g.ramp_down = num("ramp_down");
        g.min_up = inum("min_up");
        g.min_down = inum("min_down");
        g.cold_start_time = inum("cold_start_time");
        g.cost_q = num("cost_q");
        g.cost_l = num("cost_l");
        g.cost_noload = num("cost_noload");
        g.cost_startup = num("cost_startup");
        g.cost_hot_startup = num("cost_hot_startup");
        g.cost_shutdown = num("cost_shutdown");
        const auto& init_on = detail::require_field(gj, "initial_status_on", path);
        if (!init_on.is_boolean()) throw ParseError(path + ".initial_status_on: expected a bool");
        g.initial_status_on = init_on.get<bool>();
        g.initial_status_duration = inum("initial_status_duration");
        if (gj.contains("initial_output"))
            g.initial_output = detail::require_number(gj["initial_output"], path + ".initial_output");
        cs.generators.push_back(std::move(g));
    }

    validate_case(cs);
    return cs;
}

inline NetworkCase load_case(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_case(buf.str());
}

/// Serialize back to the canonical format. parse_case(emit_case(cs)) == cs.
inline std::string emit_case(const NetworkCase& cs) {
    nlohmann::ordered_json j;
    j["horizon"] = cs.horizon;
    j["base_mva"] = cs.base_mva;
    j["areas"] = nlohmann::ordered_json::array();
    for (const auto& a : cs.areas) j["areas"].push_back({{"id", a.id}});
    j["buses"] = nlohmann::ordered_json::array();
    for (const auto& b : cs.buses)
        j["buses"].push_back({{"id", b.id}, {"area_id", b.area_id}, {"demand", b.demand}});
    j["branches"] = nlohmann::ordered_json::array();
    for (const auto& br : cs.branches)
        j["branches"].push_back({{"id", br.id},
                                 {"from_bus", br.from_bus},
                                 {"to_bus", br.to_bus},
                                 {"reactance", br.reactance},
                                 {"flow_limit", br.flow_limit}});
    j["generators"] = nlohmann::ordered_json::array();
    for (const auto& g : cs.generators) {
        nlohmann::ordered_json gj = {{"id", g.id},
                                     {"bus_id", g.bus_id},
                                     {"p_min", g.p_min},
                                     {"p_max", g.p_max},
                                     {"p_su_max", g.p_su_max},
                                     {"p_sd_max", g.p_sd_max},
                                     {"ramp_up", g.ramp_up},
                                     {"ramp_down", g.ramp_down},
                                     {"min_up", g.min_up},
                                     {"min_down", g.min_down},
                                     {"cold_start_time", g.cold_start_time},
                                     {"cost_q", g.cost_q},
                                     {"cost_l", g.cost_l},
                                     {"cost_noload", g.cost_noload},
                                     {"cost_startup", g.cost_startup},
                                     {"cost_hot_startup", g.cost_hot_startup},
                                     {"cost_shutdown", g.cost_shutdown},
                                     {"initial_status_on", g.initial_status_on},
                                     {"initial_status_duration", g.initial_status_duration}};
        if (g.initial_output) gj["initial_output"] = *g.initial_output;
        j["generators"].push_back(std::move(gj));
    }
    return j.dump(2) + "\n";
}

/// DC Laplacian in per-unit: B_ii = sum 1/x over incident branches,
/// B_ij = -1/x (parallel branch reciprocals add). Rows sum to zero.
inline Eigen::MatrixXd build_admittance(const NetworkCase& cs) {
    const int n = static_cast<int>(cs.buses.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (const auto& br : cs.branches) {
        const int i = cs.bus_index(br.from_bus);
        const int j = cs.bus_index(br.to_bus);
        const double y = 1.0 / br.reactance;
        B(i, i) += y;
        B(j, j) += y;
        B(i, j) -= y;
        B(j, i) -= y;
    }
    return B;
}

/// Split the case into per-area views and derive the consensus topology.
inline AreaPartition partition_areas(const NetworkCase& cs) {
    AreaPartition part;
    const int n_areas = static_cast<int>(cs.areas.size());
    part.views.resize(static_cast<std::size_t>(n_areas));
    for (int a = 0; a < n_areas; ++a)
        part.views[static_cast<std::size_t>(a)].area_id = cs.areas[static_cast<std::size_t>(a)].id;

    std::vector<int> bus_area(cs.buses.size());
    for (std::size_t i = 0; i < cs.buses.size(); ++i) {
        bus_area[i] = cs.area_index(cs.buses[i].area_id);
        part.views[static_cast<std::size_t>(bus_area[i])].internal_buses.push_back(
            static_cast<int>(i));
    }
    for (const auto& v : part.views)
        if (v.internal_buses.empty())
            throw ValidationError("areas: area '" + v.area_id + "' has no internal buses");

    std::set<int> shared;
    for (std::size_t b = 0; b < cs.branches.size(); ++b) {
        const int i = cs.bus_index(cs.branches[b].from_bus);
        const int j = cs.bus_index(cs.branches[b].to_bus);
        const int ai = bus_area[static_cast<std::size_t>(i)];
        const int aj = bus_area[static_cast<std::size_t>(j)];
        if (ai == aj) {
            part.views[static_cast<std::size_t>(ai)].internal_branches.push_back(
                static_cast<int>(b));
        } else {
            part.tie_lines.push_back(static_cast<int>(b));
            part.views[static_cast<std::size_t>(ai)].tie_lines.push_back(static_cast<int>(b));
            part.views[static_cast<std::size_t>(aj)].tie_lines.push_back(static_cast<int>(b));
            shared.insert(i);
            shared.insert(j);
        }
    }

    // External adjacency, in case order for determinism.
    for (auto& v : part.views) {
        std::set<int> ext;
        for (int b : v.tie_lines) {
            const int i = cs.bus_index(cs.branches[static_cast<std::size_t>(b)].from_bus);
            const int j = cs.bus_index(cs.branches[static_cast<std::size_t>(b)].to_bus);
            const int a = cs.area_index(v.area_id);
            if (bus_area[static_cast<std::size_t>(i)] != a) ext.insert(i);
            if (bus_area[static_cast<std::size_t>(j)] != a) ext.insert(j);
        }
        v.external_buses.assign(ext.begin(), ext.end());
        v.view_buses = v.internal_buses;
        v.view_buses.insert(v.view_buses.end(), v.external_buses.begin(), v.external_buses.end());
    }

    for (std::size_t g = 0; g < cs.generators.size(); ++g) {
        const int bus = cs.bus_index(cs.generators[g].bus_id);
        part.views[static_cast<std::size_t>(bus_area[static_cast<std::size_t>(bus)])]
            .generators.push_back(static_cast<int>(g));
    }

    // Shared buses ascending by id string: the canonical consensus order.
    part.shared_buses.assign(shared.begin(), shared.end());
    std::sort(part.shared_buses.begin(), part.shared_buses.end(), [&](int a, int b) {
        return cs.buses[static_cast<std::size_t>(a)].id < cs.buses[static_cast<std::size_t>(b)].id;
    });
    for (int s : part.shared_buses) {
        std::vector<int> owners;
        for (int a = 0; a < n_areas; ++a)
            if (part.views[static_cast<std::size_t>(a)].contains_view_bus(s))
                owners.push_back(a);
        part.areas_of_shared.push_back(std::move(owners));
    }
    return part;
}

struct CaseStats {
    int n_buses = 0;
    int n_areas = 0;
    int n_generators = 0;
    int n_tie_lines = 0;
    int n_shared_buses = 0;
};

inline CaseStats case_stats(const NetworkCase& cs) {
    const AreaPartition part = partition_areas(cs);
    CaseStats s;
    s.n_buses = static_cast<int>(cs.buses.size());
    s.n_areas = static_cast<int>(cs.areas.size());
    s.n_generators = static_cast<int>(cs.generators.size());
    s.n_tie_lines = static_cast<int>(part.tie_lines.size());
    s.n_shared_buses = static_cast<int>(part.shared_buses.size());
    return s;
}

}  // namespace gridclear
