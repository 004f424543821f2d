#include "railpca/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace railpca {
namespace {

constexpr double kPivotTolerance = 1e-12;
// Reference tie for galvanically floating stubs; far below any physical
// admittance in the model but comfortably above the pivot tolerance.
constexpr double kFloatingPinSiemens = 1e-9;

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Side of a plane: L faces the emitter, R faces the receiver. A breakage
// splits the broken conductor's boundary node into unconnected L/R halves.
enum Side { kLeft = 0, kRight = 1 };

struct Builder {
    const SectionModel& model;
    int sections;                 // total pi-sections
    int planes;                   // sections + 1
    std::vector<double> plane_km;
    std::set<std::pair<int, int>> splits;  // (plane, conductor)
    std::map<std::tuple<int, int, int>, int> node_ids;  // (plane, conductor, side)
    AdmittanceSystem sys;
    int bus_pos = -1, bus_neg = -1, bus_recv = -1;

    explicit Builder(const SectionModel& m) : model(m) {
        sections = static_cast<int>(m.segments.size()) * m.sections_per_segment;
        planes = sections + 1;
    }

    int add_node(const std::string& name) {
        sys.node_names.push_back(name);
        return static_cast<int>(sys.node_names.size()) - 1;
    }

    int node(int plane, int conductor, Side side) {
        int s = side;
        if (!splits.count({plane, conductor})) s = kLeft;  // unsplit: one shared node
        auto key = std::make_tuple(plane, conductor, s);
        auto it = node_ids.find(key);
        if (it != node_ids.end()) return it->second;
        std::ostringstream name;
        name << conductor_symbol(conductor) << "@" << plane_km[plane] << "km";
        if (splits.count({plane, conductor})) name << (s == kLeft ? ":L" : ":R");
        int id = add_node(name.str());
        node_ids[key] = id;
        return id;
    }

    const SegmentParams& section_params(int s) const {
        return model.segments[static_cast<std::size_t>(s) / model.sections_per_segment];
    }
    double section_length(int s) const {
        return section_params(s).length_km / model.sections_per_segment;
    }

    void build();
};

void stamp_admittance(MatrixXcd& m, int a, int b, Complex y) {
    if (a >= 0) m(a, a) += y;
    if (b >= 0) m(b, b) += y;
    if (a >= 0 && b >= 0) {
        m(a, b) -= y;
        m(b, a) -= y;
    }
}

Eigen::Matrix4cd section_series_admittance(const SegmentParams& p, double len, double omega) {
    Eigen::Matrix4cd z = Complex(0.0, omega * len) *
                         p.inductance_per_km().cast<Complex>();
    for (int i = 0; i < 4; ++i) z(i, i) += Complex(p.r_per_km * len, 0.0);
    Eigen::FullPivLU<Eigen::Matrix4cd> lu(z);
    if (!lu.isInvertible()) {
        throw IllConditionedError("ill-conditioned network: singular series impedance block");
    }
    return lu.inverse();
}

void Builder::build() {
    const double omega = 2.0 * M_PI * model.frequency_hz;

    plane_km.resize(planes);
    plane_km[0] = 0.0;
    for (int s = 0; s < sections; ++s) plane_km[s + 1] = plane_km[s] + section_length(s);

    for (const auto& br : model.breakages) {
        splits.insert({br.quarter * model.sections_per_segment,
                       conductor_index(br.track, br.rail)});
    }

    // Materialise all rail nodes first so numbering is stable, then buses.
    for (int p = 0; p < planes; ++p) {
        for (int c = 0; c < 4; ++c) {
            node(p, c, kLeft);
            if (splits.count({p, c})) node(p, c, kRight);
        }
    }
    bus_pos = add_node("emitter+");
    bus_neg = add_node("emitter-");
    bus_recv = add_node("receiver-bus");
    sys.node_count = static_cast<int>(sys.node_names.size());

    // Branch list: emitter bonds, source, receiver ports.
    auto add_branch = [&](const std::string& name, int p, int q, Complex z, Complex emf) {
        sys.branches.push_back(
            {name, static_cast<int>(sys.branches.size()), p, q, z, emf});
    };
    if (model.injection.kind == InjectionMode::Kind::joint) {
        add_branch("bond:1e", node(0, 0, kRight), bus_pos, 0.0, 0.0);
        add_branch("bond:1i", node(0, 1, kRight), bus_pos, 0.0, 0.0);
        add_branch("bond:2i", node(0, 2, kRight), bus_neg, 0.0, 0.0);
        add_branch("bond:2e", node(0, 3, kRight), bus_neg, 0.0, 0.0);
    } else {
        const int t = model.injection.track;
        add_branch("bond:" + std::to_string(t) + "e",
                   node(0, conductor_index(t, Rail::external), kRight), bus_pos, 0.0, 0.0);
        add_branch("bond:" + std::to_string(t) + "i",
                   node(0, conductor_index(t, Rail::internal), kRight), bus_neg, 0.0, 0.0);
    }
    add_branch("source", bus_pos, bus_neg, model.source_impedance,
               Complex(model.source_voltage, 0.0));
    const int source_branch = static_cast<int>(sys.branches.size()) - 1;
    for (int c = 0; c < 4; ++c) {
        add_branch("port:" + conductor_symbol(c), node(planes - 1, c, kLeft), bus_recv,
                   model.termination_impedance, 0.0);
    }

    const int n = sys.node_count + static_cast<int>(sys.branches.size());
    sys.matrix = MatrixXcd::Zero(n, n);
    sys.rhs = VectorXcd::Zero(n);

    // Galvanic connectivity; the extra vertex is the ground reference.
    const int ground_vertex = sys.node_count;
    UnionFind components(sys.node_count + 1);

    // Series blocks and shunts, one pi-section at a time.
    for (int s = 0; s < sections; ++s) {
        const SegmentParams& par = section_params(s);
        const double len = section_length(s);
        const Eigen::Matrix4cd y4 = section_series_admittance(par, len, omega);

        std::array<int, 4> left{}, right{};
        for (int c = 0; c < 4; ++c) {
            left[c] = node(s, c, kRight);      // side of plane s facing this section
            right[c] = node(s + 1, c, kLeft);  // side of plane s+1 facing this section
            components.unite(left[c], right[c]);
        }
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                const Complex y = y4(i, j);
                sys.matrix(left[i], left[j]) += y;
                sys.matrix(right[i], right[j]) += y;
                sys.matrix(left[i], right[j]) -= y;
                sys.matrix(right[i], left[j]) -= y;
            }
        }
        if (s == 0) {
            sys.emitter_block = y4;
            sys.emitter_from = left;
            sys.emitter_to = right;
        }
        if (s == sections - 1) {
            sys.receiver_block = y4;
            sys.receiver_from = left;
            sys.receiver_to = right;
        }

        const Complex y_rr(par.g_rail_rail_per_km * len / 2.0,
                           omega * par.c_rail_rail_per_km * len / 2.0);
        const Complex y_rg(par.g_rail_gnd_per_km * len / 2.0,
                           omega * par.c_rail_gnd_per_km * len / 2.0);
        for (int end = 0; end < 2; ++end) {
            const int plane = end == 0 ? s : s + 1;
            const Side side = end == 0 ? kRight : kLeft;
            std::array<int, 4> at{};
            for (int c = 0; c < 4; ++c) at[c] = node(plane, c, side);
            if (y_rr != 0.0) {
                stamp_admittance(sys.matrix, at[0], at[1], y_rr);  // track 1 pair
                stamp_admittance(sys.matrix, at[2], at[3], y_rr);  // track 2 pair
                components.unite(at[0], at[1]);
                components.unite(at[2], at[3]);
            }
            if (y_rg != 0.0) {
                for (int c = 0; c < 4; ++c) {
                    stamp_admittance(sys.matrix, at[c], -1, y_rg);
                    components.unite(at[c], ground_vertex);
                }
            }
        }
    }

    // Branch stamps: KCL column and the branch equation row.
    for (const auto& br : sys.branches) {
        const int row = sys.branch_row(br.index);
        if (br.node_p >= 0) {
            sys.matrix(br.node_p, row) += 1.0;
            sys.matrix(row, br.node_p) += 1.0;
        }
        if (br.node_q >= 0) {
            sys.matrix(br.node_q, row) -= 1.0;
            sys.matrix(row, br.node_q) -= 1.0;
        }
        sys.matrix(row, row) -= br.impedance;
        sys.rhs(row) = br.emf;
        if (br.index != source_branch) components.unite(br.node_p, br.node_q);
    }

    // Return-path check: with the source edge excluded, both source terminals
    // must already sit in one galvanic component.
    if (components.find(bus_pos) != components.find(bus_neg)) {
        std::vector<std::string> pos_side, neg_side;
        for (int v = 0; v < sys.node_count; ++v) {
            if (components.find(v) == components.find(bus_pos)) {
                pos_side.push_back(sys.node_names[v]);
            } else if (components.find(v) == components.find(bus_neg)) {
                neg_side.push_back(sys.node_names[v]);
            }
        }
        const auto& isolated = pos_side.size() <= neg_side.size() ? pos_side : neg_side;
        std::string msg = "floating subnetwork: source has no return path; isolated nodes:";
        for (const auto& name : isolated) msg += " " + name;
        throw FloatingSubnetworkError(msg);
    }
    components.unite(bus_pos, bus_neg);

    // Pin one node of every ground-less component so stub potentials are defined.
    std::set<int> pinned;
    for (int v = 0; v < sys.node_count; ++v) {
        const int root = components.find(v);
        if (root == components.find(ground_vertex) || pinned.count(root)) continue;
        sys.matrix(v, v) += Complex(kFloatingPinSiemens, 0.0);
        pinned.insert(root);
    }
}

}  // namespace

Eigen::Matrix4d SegmentParams::inductance_per_km() const {
    Eigen::Matrix4d m;
    const double l = l_per_km, a = m_intra_per_km, r = m_inter_per_km;
    m << l, a, r, r,
         a, l, r, r,
         r, r, l, a,
         r, r, a, l;
    return m;
}

bool SegmentParams::is_passive() const {
    const Eigen::Matrix4d m = inductance_per_km();
    if (m.isZero(0.0)) return true;  // no inductance at all
    Eigen::LLT<Eigen::Matrix4d> llt(m);
    return llt.info() == Eigen::Success;
}

void SegmentParams::validate() const {
    const double vals[] = {length_km,          r_per_km,          l_per_km,
                           m_intra_per_km,     m_inter_per_km,    c_rail_rail_per_km,
                           g_rail_rail_per_km, c_rail_gnd_per_km, g_rail_gnd_per_km};
    for (double v : vals) {
        if (!std::isfinite(v)) throw ParameterError("segment parameter not finite");
    }
    if (length_km <= 0.0) throw ParameterError("segment length must be positive");
    if (r_per_km < 0 || l_per_km < 0 || c_rail_rail_per_km < 0 || g_rail_rail_per_km < 0 ||
        c_rail_gnd_per_km < 0 || g_rail_gnd_per_km < 0) {
        throw ParameterError("segment R/L/C/G values must be non-negative");
    }
    if (!is_passive()) {
        throw ParameterError("segment inductance matrix is not positive definite "
                             "(mutual inductance exceeds self-inductance)");
    }
}

SoilPreset SoilPreset::dry() { return {"dry", 0.1, 1.0}; }
SoilPreset SoilPreset::wet() { return {"wet", 1.0, 30.0}; }

void SoilPreset::validate() const {
    if (!(water_content_pct > 0.0)) throw ParameterError("soil water content must be positive");
    if (!(g_scale > 0.0)) throw ParameterError("soil g_scale must be positive");
}

std::string BreakageSpec::label() const {
    return "R" + std::to_string(track) + rail_char(rail) + std::to_string(quarter) + "/4";
}

void BreakageSpec::validate(int segment_count) const {
    if (track != 1 && track != 2) throw ParameterError("breakage track must be 1 or 2");
    if (quarter < 1 || quarter >= segment_count) {
        throw ParameterError("breakage quarter must be in [1, " +
                             std::to_string(segment_count - 1) + "], got " +
                             std::to_string(quarter));
    }
}

void SectionModel::validate_basic() const {
    if (segments.empty()) throw ParameterError("model needs at least one segment");
    for (const auto& s : segments) s.validate();
    if (!(frequency_hz > 0.0)) throw ParameterError("frequency must be positive");
    if (sections_per_segment < 1) throw ParameterError("sections_per_segment must be >= 1");
    std::set<std::pair<int, Rail>> seen;
    for (const auto& br : breakages) {
        br.validate(static_cast<int>(segments.size()));
        if (!seen.insert({br.track, br.rail}).second) {
            throw ParameterError("more than one breakage on rail " + br.label().substr(0, 3));
        }
    }
}

void SectionModel::validate() const {
    validate_basic();
    if (segments.size() != 4) throw ParameterError("pipeline model must have 4 segments");
    double total = 0.0;
    for (const auto& s : segments) total += s.length_km;
    if (std::abs(total - 8.0) > 1e-9) {
        throw ParameterError("pipeline model must span 8 km, got " + std::to_string(total));
    }
}

SectionModel SectionModel::default_model() {
    SegmentParams seg;
    seg.length_km = 2.0;
    seg.r_per_km = 1.0;
    seg.l_per_km = 1.4e-3;
    seg.m_intra_per_km = 0.6e-3;
    seg.m_inter_per_km = 0.1e-3;
    seg.c_rail_rail_per_km = 0.02e-6;
    seg.g_rail_rail_per_km = 2.5e-3;
    seg.c_rail_gnd_per_km = 0.85e-6;
    seg.g_rail_gnd_per_km = 5.0e-4;

    SectionModel m;
    m.segments.assign(4, seg);
    m.frequency_hz = 800.0;
    m.source_voltage = 10.0;
    m.source_impedance = Complex(10.0, 0.0);
    m.termination_impedance = Complex(10.0, 0.0);
    return m;
}

SectionModel apply_soil(const SectionModel& model, const SoilPreset& preset) {
    preset.validate();
    SectionModel out = model;
    for (auto& seg : out.segments) {
        seg.g_rail_rail_per_km *= preset.g_scale;
        seg.g_rail_gnd_per_km *= preset.g_scale;
    }
    return out;
}

MeasuredMagnitudes RailCurrents::magnitudes() const {
    MeasuredMagnitudes m;
    for (int i = 0; i < 8; ++i) m.values[i] = std::abs(phasors[i]);
    return m;
}

const AdmittanceSystem::Branch* AdmittanceSystem::find_branch(const std::string& name) const {
    for (const auto& b : branches) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

AdmittanceSystem build_admittance(const SectionModel& model) {
    model.validate_basic();
    Builder builder(model);
    builder.build();
    return std::move(builder.sys);
}

VectorXcd solve_system(const AdmittanceSystem& sys) {
    Eigen::PartialPivLU<MatrixXcd> lu(sys.matrix);
    const auto diag = lu.matrixLU().diagonal();
    double min_pivot = std::numeric_limits<double>::infinity();
    double max_pivot = 0.0;
    for (int i = 0; i < diag.size(); ++i) {
        const double mag = std::abs(diag(i));
        min_pivot = std::min(min_pivot, mag);
        max_pivot = std::max(max_pivot, mag);
    }
    if (!(min_pivot > kPivotTolerance * max_pivot)) {
        std::ostringstream msg;
        msg << "ill-conditioned network: pivot ratio " << (min_pivot / max_pivot)
            << " below tolerance " << kPivotTolerance << " (condition estimate "
            << (max_pivot / std::max(min_pivot, 1e-300)) << ")";
        throw IllConditionedError(msg.str());
    }
    return lu.solve(sys.rhs);
}

RailCurrents extract_currents(const AdmittanceSystem& sys, const VectorXcd& solution) {
    auto block_currents = [&](const Eigen::Matrix4cd& y4, const std::array<int, 4>& from,
                              const std::array<int, 4>& to) {
        Eigen::Vector4cd dv;
        for (int c = 0; c < 4; ++c) dv(c) = solution(from[c]) - solution(to[c]);
        return (y4 * dv).eval();
    };
    const Eigen::Vector4cd emit = block_currents(sys.emitter_block, sys.emitter_from, sys.emitter_to);
    const Eigen::Vector4cd recv =
        block_currents(sys.receiver_block, sys.receiver_from, sys.receiver_to);
    RailCurrents out;
    for (int c = 0; c < 4; ++c) {
        out.phasors[c] = emit(c);
        out.phasors[4 + c] = recv(c);
    }
    return out;
}

RailCurrents solve_currents(const SectionModel& model, const InjectionMode& injection) {
    SectionModel m = model;
    m.injection = injection;
    const AdmittanceSystem sys = build_admittance(m);
    return extract_currents(sys, solve_system(sys));
}

Complex source_power(const AdmittanceSystem& sys, const VectorXcd& solution) {
    const auto* src = sys.find_branch("source");
    if (src == nullptr) throw ConfigurationError("system has no source branch");
    const Complex i_src = solution(sys.branch_row(src->index));
    return src->emf * std::conj(-i_src);
}

}  // namespace railpca
