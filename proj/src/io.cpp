#include "povm/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace povm::io {

namespace {

const Json &field(const Json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw InvalidInput(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

double number(const Json &j, const char *what) {
    if (!j.is_number()) {
        throw InvalidInput(std::string(what) + " must be a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw InvalidInput(std::string(what) + " must be finite");
    }
    return v;
}

std::size_t count(const Json &j, const char *what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw InvalidInput(std::string(what) + " must be a nonnegative integer");
    }
    return j.get<std::size_t>();
}

const Json &array(const Json &j, const char *what) {
    if (!j.is_array()) {
        throw InvalidInput(std::string(what) + " must be an array");
    }
    return j;
}

std::string text(const Json &j, const char *what) {
    if (!j.is_string()) {
        throw InvalidInput(std::string(what) + " must be a string");
    }
    return j.get<std::string>();
}

Eigen::Vector3d vec3(const Json &j, const char *what) {
    if (!j.is_array() || j.size() != 3) {
        throw InvalidInput(std::string(what) + " must be a 3-vector");
    }
    return {number(j[0], what), number(j[1], what), number(j[2], what)};
}

Json vec3_json(const Eigen::Vector3d &v) { return Json::array({v.x(), v.y(), v.z()}); }

std::pair<double, double> pair(const Json &j, const char *what) {
    if (!j.is_array() || j.size() != 2) {
        throw InvalidInput(std::string(what) + " must be a two-element array");
    }
    return {number(j[0], what), number(j[1], what)};
}

Json patch_to_json(const SpherePatch &p) {
    Json frame = Json::array();
    for (int c = 0; c < 3; ++c) {
        frame.push_back(vec3_json(p.frame.col(c)));
    }
    return {{"frame", frame}, {"z", {p.z_lo, p.z_hi}}, {"phi", {p.phi_lo, p.phi_len}}};
}

SpherePatch patch_from_json(const Json &j, const Tolerances &tol) {
    SpherePatch p;
    if (j.contains("frame")) {
        const Json &f = array(j.at("frame"), "patch frame");
        if (f.size() != 3) {
            throw InvalidInput("patch frame needs three columns");
        }
        for (int c = 0; c < 3; ++c) {
            p.frame.col(c) = vec3(f[static_cast<std::size_t>(c)], "patch frame column");
        }
    } else if (j.contains("axis")) {
        p.frame = frame_about(make_direction(vec3(j.at("axis"), "patch axis"), tol.direction));
    }
    std::tie(p.z_lo, p.z_hi) = pair(field(j, "z"), "patch z range");
    if (j.contains("phi")) {
        std::tie(p.phi_lo, p.phi_len) = pair(j.at("phi"), "patch azimuth range");
    }
    return p;
}

} // namespace

void check_schema(const Json &j) {
    if (j.is_object() && j.contains("schema")) {
        const Json &s = j.at("schema");
        if (!s.is_number_integer() || s.get<int>() != kSchema) {
            throw InvalidInput("unsupported schema version " + s.dump());
        }
    }
}

Json matrix_to_json(const Operator &m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real() + 0.0, m(r, c).imag() + 0.0});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Operator matrix_from_json(const Json &j) {
    if (!j.is_array() || j.empty()) {
        throw InvalidInput("matrix must be a nonempty array of rows");
    }
    const auto d = static_cast<Eigen::Index>(j.size());
    Operator m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const Json &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
            throw DimensionMismatch("matrix must be square");
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            const auto [re, im] = pair(row[static_cast<std::size_t>(c)], "matrix entry [re, im]");
            m(r, c) = {re, im};
        }
    }
    return m;
}

Json space_to_json(const OutcomeSpace &s) {
    switch (s.kind) {
    case SpaceKind::Labels:
        return {{"kind", "labels"}, {"n", s.labels}};
    case SpaceKind::Circle:
        return {{"kind", "circle"}};
    case SpaceKind::Sphere:
        return {{"kind", "sphere"}};
    }
    return {};
}

OutcomeSpace space_from_json(const Json &j) {
    const std::string kind = text(field(j, "kind"), "space kind");
    if (kind == "labels") {
        return OutcomeSpace::finite(count(field(j, "n"), "label count"));
    }
    if (kind == "circle") {
        return OutcomeSpace::circle();
    }
    if (kind == "sphere") {
        return OutcomeSpace::sphere();
    }
    throw InvalidInput("unknown space kind '" + kind + "'");
}

Json point_to_json(const OutcomePoint &p) {
    if (const auto *l = std::get_if<Label>(&p)) {
        return l->index;
    }
    if (const auto *a = std::get_if<Angle>(&p)) {
        return a->radians;
    }
    return vec3_json(std::get<Direction>(p));
}

OutcomePoint point_from_json(const Json &j, const std::optional<OutcomeSpace> &space, const Tolerances &tol) {
    SpaceKind kind;
    if (space) {
        kind = space->kind;
    } else if (j.is_array()) {
        kind = SpaceKind::Sphere;
    } else if (j.is_number_integer()) {
        kind = SpaceKind::Labels;
    } else {
        kind = SpaceKind::Circle;
    }
    OutcomePoint p;
    switch (kind) {
    case SpaceKind::Labels:
        p = Label{count(j, "label")};
        break;
    case SpaceKind::Circle:
        p = make_angle(number(j, "angle"));
        break;
    case SpaceKind::Sphere:
        p = make_direction(vec3(j, "direction"), tol.direction);
        break;
    }
    if (space && !lies_in(p, *space)) {
        throw SpaceMismatch("point " + j.dump() + " is not in the outcome space");
    }
    return p;
}

Json povm_to_json(const FinitePovm &p) {
    Json entries = Json::array();
    for (const auto &e : p.entries()) {
        entries.push_back({{"point", point_to_json(e.point)}, {"element", matrix_to_json(e.element)}});
    }
    Json j = {{"schema", kSchema}, {"dim", p.dim()}, {"space", space_to_json(p.space())}, {"entries", entries}};
    if (p.allows_duplicate_points()) {
        j["allow_duplicates"] = true;
    }
    return j;
}

FinitePovm povm_from_json(const Json &j, const Tolerances &tol) {
    check_schema(j);
    const std::size_t dim = count(field(j, "dim"), "dim");
    const OutcomeSpace space = space_from_json(field(j, "space"));
    std::vector<PovmEntry> entries;
    for (const auto &e : array(field(j, "entries"), "entries")) {
        PovmEntry entry{point_from_json(field(e, "point"), space, tol), matrix_from_json(field(e, "element"))};
        if (static_cast<std::size_t>(entry.element.rows()) != dim) {
            throw DimensionMismatch("element dimension differs from 'dim'");
        }
        entries.push_back(std::move(entry));
    }
    const bool dup = j.contains("allow_duplicates") && j.at("allow_duplicates").get<bool>();
    return FinitePovm(space, std::move(entries), dup, tol);
}

Json decomposition_to_json(const DecompositionResult &r, bool complete) {
    Json terms = Json::array();
    for (const auto &t : r.terms) {
        terms.push_back({{"weight", t.weight}, {"path", t.path}, {"povm", povm_to_json(t.povm)}});
    }
    return {{"schema", kSchema}, {"complete", complete}, {"depth", r.depth}, {"terms", terms}};
}

DecompositionResult decomposition_from_json(const Json &j, const Tolerances &tol) {
    check_schema(j);
    DecompositionResult r;
    if (j.contains("depth")) {
        r.depth = count(j.at("depth"), "depth");
    }
    for (const auto &t : array(field(j, "terms"), "terms")) {
        DecompositionTerm term{number(field(t, "weight"), "weight"), povm_from_json(field(t, "povm"), tol),
                               t.contains("path") ? text(t.at("path"), "path") : std::string()};
        r.terms.push_back(std::move(term));
    }
    return r;
}

NamedState state_from_json(const Json &j, const Tolerances &tol) {
    check_schema(j);
    const std::string id = j.contains("id") ? text(j.at("id"), "state id") : std::string("state");
    if (j.contains("bloch")) {
        const Eigen::Vector3d r = vec3(j.at("bloch"), "Bloch vector");
        return {id, DensityMatrix(DensityMatrix::from_bloch(r).matrix(), tol)};
    }
    return {id, DensityMatrix(matrix_from_json(field(j, "matrix")), tol)};
}

Json state_to_json(const NamedState &s) { return {{"id", s.id}, {"matrix", matrix_to_json(s.rho.matrix())}}; }

std::vector<NamedState> states_from_json(const Json &j, const Tolerances &tol) {
    check_schema(j);
    std::vector<NamedState> out;
    for (const auto &s : array(field(j, "states"), "states")) {
        out.push_back(state_from_json(s, tol));
    }
    if (out.empty()) {
        throw InvalidInput("no states given");
    }
    return out;
}

Json states_to_json(std::span<const NamedState> states) {
    Json list = Json::array();
    for (const auto &s : states) {
        list.push_back(state_to_json(s));
    }
    return {{"schema", kSchema}, {"states", list}};
}

Region region_from_json(const Json &j, const Tolerances &tol) {
    const std::string kind = text(field(j, "kind"), "region kind");
    Region r = Region::whole(OutcomeSpace::sphere());
    if (kind == "cap") {
        r = Region::cap(make_direction(vec3(field(j, "axis"), "cap axis"), tol.direction),
                        number(field(j, "half_angle"), "half_angle"));
    } else if (kind == "patch") {
        r = Region::patches({patch_from_json(j, tol)});
    } else if (kind == "patches") {
        std::vector<SpherePatch> pieces;
        for (const auto &p : array(field(j, "patches"), "patches")) {
            pieces.push_back(patch_from_json(p, tol));
        }
        r = Region::patches(std::move(pieces));
    } else if (kind == "arcs") {
        std::vector<Arc> pieces;
        for (const auto &a : array(field(j, "arcs"), "arcs")) {
            const double start = number(field(a, "start"), "arc start");
            pieces.push_back(make_arc(start, start + number(field(a, "length"), "arc length")));
        }
        r = Region::arcs(std::move(pieces));
    } else if (kind == "labels") {
        std::vector<std::size_t> members;
        for (const auto &m : array(field(j, "members"), "members")) {
            members.push_back(count(m, "label"));
        }
        r = Region::labels(count(field(j, "n"), "label count"), std::move(members));
    } else if (kind == "whole") {
        r = Region::whole(space_from_json(field(j, "space")));
    } else {
        throw InvalidInput("unknown region kind '" + kind + "'");
    }
    if (j.contains("complement") && j.at("complement").get<bool>()) {
        r = r.complement();
    }
    return r;
}

Json region_to_json(const Region &r) {
    Json j;
    switch (r.space().kind) {
    case SpaceKind::Labels:
        j = {{"kind", "labels"}, {"n", r.space().labels}, {"members", r.label_set()}};
        break;
    case SpaceKind::Circle: {
        Json arcs = Json::array();
        for (const auto &a : r.arc_list()) {
            arcs.push_back({{"start", a.start}, {"length", a.length}});
        }
        j = {{"kind", "arcs"}, {"arcs", arcs}};
        break;
    }
    case SpaceKind::Sphere: {
        Json patches = Json::array();
        for (const auto &p : r.patch_list()) {
            patches.push_back(patch_to_json(p));
        }
        j = {{"kind", "patches"}, {"patches", patches}};
        break;
    }
    }
    j["complement"] = r.complemented();
    return j;
}

std::vector<NamedRegion> regions_from_json(const Json &j, const Tolerances &tol) {
    check_schema(j);
    std::vector<NamedRegion> out;
    for (const auto &r : array(field(j, "regions"), "regions")) {
        const std::string id = r.contains("id") ? text(r.at("id"), "region id") : "r" + std::to_string(out.size());
        out.push_back({id, region_from_json(r, tol)});
    }
    if (out.empty()) {
        throw InvalidInput("no regions given");
    }
    return out;
}

Json regions_to_json(std::span<const NamedRegion> regions) {
    Json list = Json::array();
    for (const auto &r : regions) {
        Json entry = {{"id", r.id}};
        entry.update(region_to_json(r.region));
        list.push_back(std::move(entry));
    }
    return {{"schema", kSchema}, {"regions", list}};
}

ContinuousPovm family_from_string(const std::string &s) {
    if (s == "spin" || s == "spin_direction") {
        return ContinuousPovm::spin_direction();
    }
    if (s.rfind("phase:", 0) == 0) {
        const std::string digits = s.substr(6);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 3) {
            throw InvalidInput("phase family needs an integer dimension, e.g. phase:3");
        }
        return ContinuousPovm::phase(std::stoi(digits));
    }
    if (s == "phase") {
        throw InvalidInput("phase family needs a dimension, e.g. phase:3");
    }
    throw UnsupportedFamily("unknown family '" + s + "'");
}

Json family_to_json(const ContinuousPovm &c) {
    Json j = {{"family", c.name()}};
    if (c.family() == Family::Phase) {
        j["d"] = c.dim();
    }
    return j;
}

ContinuousPovm family_from_json(const Json &j) {
    const std::string name = text(field(j, "family"), "family");
    if (name == "phase") {
        const std::size_t d = count(field(j, "d"), "phase dimension");
        if (d > 64) {
            throw InvalidDimension("phase dimension out of range");
        }
        return ContinuousPovm::phase(static_cast<Eigen::Index>(d));
    }
    return family_from_string(name);
}

Json equivalence_to_json(const EquivalenceReport &r, std::span<const NamedState> states,
                         std::span<const NamedRegion> regions) {
    const bool mc = r.mode == EquivalenceMode::MonteCarlo;
    Json rows = Json::array();
    for (const auto &row : r.rows) {
        Json entry = {{"state_id", states[row.state].id},
                      {"region_id", regions[row.region].id},
                      {"p_cont", row.p_continuous},
                      {"p_scheme", row.p_scheme},
                      {"diff", row.diff}};
        if (mc) {
            entry["std_error"] = row.std_error;
        }
        rows.push_back(std::move(entry));
    }
    Json j = {{"schema", kSchema}, {"mode", mc ? "mc" : "det"}, {"budget", r.budget}, {"max_diff", r.max_diff}};
    if (mc) {
        j["max_std_error"] = r.max_std_error;
    }
    j["rows"] = rows;
    return j;
}

Json record_to_json(const OutcomeRecord &r) {
    Json j;
    j["x"] = r.x ? point_to_json(*r.x) : Json(nullptr);
    j["i"] = r.index ? Json(*r.index) : Json(nullptr);
    j["omega"] = point_to_json(r.omega);
    return j;
}

OutcomeRecord record_from_json(const Json &j, const std::optional<OutcomeSpace> &outcome_space,
                               const std::optional<OutcomeSpace> &parameter_space) {
    OutcomeRecord r;
    if (j.contains("x") && !j.at("x").is_null()) {
        r.x = point_from_json(j.at("x"), parameter_space);
    }
    if (j.contains("i") && !j.at("i").is_null()) {
        r.index = count(j.at("i"), "apparatus index");
    }
    r.omega = point_from_json(field(j, "omega"), outcome_space);
    return r;
}

void write_records(std::ostream &os, std::span<const OutcomeRecord> records, const OutcomeSpace &space,
                   const std::optional<OutcomeSpace> &parameter_space) {
    Json header = {{"schema", kSchema}, {"records", records.size()}, {"space", space_to_json(space)}};
    if (parameter_space) {
        header["parameter_space"] = space_to_json(*parameter_space);
    }
    os << header.dump() << '\n';
    for (const auto &r : records) {
        os << record_to_json(r).dump() << '\n';
    }
}

std::vector<OutcomeRecord> read_records(std::istream &is) {
    std::vector<OutcomeRecord> out;
    std::optional<OutcomeSpace> space;
    std::optional<OutcomeSpace> parameter_space;
    std::optional<std::size_t> expected;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error &e) {
            throw InvalidInput("records line " + std::to_string(line_no) + ": " + e.what());
        }
        if (line_no == 1 && j.contains("schema") && !j.contains("omega")) {
            check_schema(j);
            space = space_from_json(field(j, "space"));
            if (j.contains("parameter_space")) {
                parameter_space = space_from_json(j.at("parameter_space"));
            }
            if (j.contains("records")) {
                expected = count(j.at("records"), "record count");
            }
            continue;
        }
        out.push_back(record_from_json(j, space, parameter_space));
    }
    if (expected && *expected != out.size()) {
        throw InvalidInput("record count differs from the header");
    }
    return out;
}

Json gof_to_json(const GofReport &r) {
    return {{"schema", kSchema}, {"statistic", r.statistic}, {"dof", r.dof},       {"p_value", r.p_value},
            {"bins", r.bin_spec}, {"counts_a", r.counts_a},  {"counts_b", r.counts_b}};
}

Json merit_to_json(const MeritReport &r) {
    Json members = Json::array();
    for (const auto &m : r.per_member) {
        members.push_back({{"x", point_to_json(m.x)}, {"value", m.value}});
    }
    return {{"value", r.value}, {"spread", r.spread}, {"passed", r.passed}, {"per_member", members}};
}

Json bayes_spec_to_json(const BayesGainSpec &s) {
    Json j;
    if (s.prior == Prior::UniformSphere) {
        j = {{"prior", "uniform_sphere"}, {"gain", "fidelity"}};
    } else {
        j = {{"prior", "uniform_circle"}, {"gain", "cosine"}};
    }
    j["nodes"] = s.nodes;
    return j;
}

BayesGainSpec bayes_spec_from_json(const Json &j) {
    check_schema(j);
    BayesGainSpec s;
    const std::string prior = text(field(j, "prior"), "prior");
    const std::string gain = text(field(j, "gain"), "gain");
    if (prior == "uniform_sphere") {
        s.prior = Prior::UniformSphere;
    } else if (prior == "uniform_circle") {
        s.prior = Prior::UniformCircle;
    } else {
        throw InvalidInput("unknown prior '" + prior + "'");
    }
    if (gain == "fidelity") {
        s.gain = Gain::Fidelity;
    } else if (gain == "cosine") {
        s.gain = Gain::Cosine;
    } else {
        throw InvalidInput("unknown gain '" + gain + "'");
    }
    if (j.contains("nodes")) {
        s.nodes = count(j.at("nodes"), "nodes");
    }
    return s;
}

Json dual_to_json(const DualProcessing &d) {
    Json j;
    switch (d.kind) {
    case DualKind::Finite:
        j = {{"target", matrix_to_json(d.target)}, {"coefficients", d.coefficients}, {"residual", d.residual}};
        break;
    case DualKind::Spin:
        j = {{"family", "spin"}, {"a0", d.a0}, {"a", vec3_json(d.a)}};
        break;
    case DualKind::Phase: {
        Json t = Json::array();
        for (const auto &c : d.toeplitz) {
            t.push_back({c.real(), c.imag()});
        }
        j = {{"family", "phase"}, {"toeplitz", t}};
        break;
    }
    }
    return j;
}

Json estimate_to_json(const EstimateReport &r) {
    Json j = {{"estimate", r.estimate}, {"std_error", r.std_error}, {"n", r.n}};
    j["exact"] = r.exact ? Json(*r.exact) : Json(nullptr);
    return j;
}

Json validation_to_json(const ValidationReport &r) {
    return {{"schema", kSchema},
            {"passed", r.passed},
            {"psd_ok", r.psd_ok},
            {"complete_ok", r.complete_ok},
            {"worst_psd_margin", r.worst_psd_margin},
            {"worst_element", r.worst_element},
            {"completeness_defect", r.completeness_defect},
            {"duplicate_points", r.duplicate_points},
            {"psd_margins", r.psd_margins},
            {"violations", r.violations}};
}

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string &path, const Json &j, int indent) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidInput("cannot write '" + path + "'");
    }
    out << j.dump(indent) << '\n';
    if (!out) {
        throw InvalidInput("write to '" + path + "' failed");
    }
}

} // namespace povm::io
