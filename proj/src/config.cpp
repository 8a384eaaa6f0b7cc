#include "vfo_adr/config.hpp"

#include "vfo_adr/scenarios.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace vfo_adr {

namespace {

using json = nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double as_double(const json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ParseError(where, "expected an integer");
    return j.get<int>();
}

bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) throw ParseError(where, "expected true or false");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where, "expected a string");
    return j.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> as_vector(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != N) throw ParseError(where, "expected an array of " + std::to_string(N) + " numbers");
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) v(i) = as_double(j[i], index(where, i));
    return v;
}

Mat6 as_mat6(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 6) throw ParseError(where, "expected 6 rows of 6 numbers");
    Mat6 m;
    for (int r = 0; r < 6; ++r) m.row(r) = as_vector<6>(j[r], index(where, r)).transpose();
    return m;
}

// Object reader that remembers which keys were consumed.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ParseError(path_.empty() ? "document" : path_, "expected an object");
    }

    template <typename F>
    void opt(const std::string& key, F&& f) {
        seen_.insert(key);
        if (auto it = j_.find(key); it != j_.end()) f(*it, join(path_, key));
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) throw ParseError(join(path_, item.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

#define VFO_NUM(obj, key, target) obj.opt(key, [&](const json& v, const std::string& w) { target = as_double(v, w); })
#define VFO_INT(obj, key, target) obj.opt(key, [&](const json& v, const std::string& w) { target = as_int(v, w); })
#define VFO_VEC6(obj, key, target) obj.opt(key, [&](const json& v, const std::string& w) { target = as_vector<6>(v, w); })

SurfaceTerms parse_surface(const json& j, const std::string& path) {
    SurfaceTerms s;
    Obj o(j, path);
    VFO_NUM(o, "constant", s.constant);
    o.opt("monomials", [&](const json& arr, const std::string& w) {
        if (!arr.is_array()) throw ParseError(w, "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            MonomialTerm m;
            Obj t(arr[i], index(w, i));
            VFO_NUM(t, "coefficient", m.coefficient);
            t.opt("powers", [&](const json& p, const std::string& pw) {
                if (!p.is_array() || p.size() != 3) throw ParseError(pw, "expected three integer powers");
                for (int a = 0; a < 3; ++a) m.powers[a] = as_int(p[a], index(pw, a));
            });
            t.finish();
            s.monomials.push_back(m);
        }
    });
    o.opt("trig", [&](const json& arr, const std::string& w) {
        if (!arr.is_array()) throw ParseError(w, "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            TrigTerm tt;
            Obj t(arr[i], index(w, i));
            VFO_NUM(t, "coefficient", tt.coefficient);
            t.opt("kind", [&](const json& v, const std::string& kw) {
                const std::string k = as_string(v, kw);
                if (k == "sin") tt.kind = TrigTerm::Kind::Sin;
                else if (k == "cos") tt.kind = TrigTerm::Kind::Cos;
                else throw ParseError(kw, "expected \"sin\" or \"cos\"");
            });
            VFO_INT(t, "axis", tt.axis);
            VFO_NUM(t, "frequency_rad_m", tt.frequency);
            VFO_NUM(t, "phase_rad", tt.phase);
            t.finish();
            s.trig.push_back(tt);
        }
    });
    o.finish();
    return s;
}

void parse_shape(const json& j, const std::string& path, PathConfig& pc) {
    Obj o(j, path);
    std::string type;
    o.opt("type", [&](const json& v, const std::string& w) { type = as_string(v, w); });
    if (type == "helix") {
        HelixPath h;
        VFO_NUM(o, "amplitude_m", h.amplitude);
        VFO_NUM(o, "wavenumber_rad_m", h.wavenumber);
        pc.shape = h;
    } else if (type == "plane_ellipse") {
        PlaneEllipsePath e;
        VFO_NUM(o, "semi_x_m", e.semi_x);
        VFO_NUM(o, "semi_y_m", e.semi_y);
        o.opt("plane_normal", [&](const json& v, const std::string& w) { e.plane_normal = as_vector<3>(v, w); });
        VFO_NUM(o, "plane_offset_m", e.plane_offset);
        pc.shape = e;
    } else if (type == "tabulated") {
        TabulatedPath t;
        o.opt("s1", [&](const json& v, const std::string& w) { t.s1 = parse_surface(v, w); });
        o.opt("s2", [&](const json& v, const std::string& w) { t.s2 = parse_surface(v, w); });
        pc.shape = t;
    } else {
        throw ParseError(join(path, "type"), "expected \"helix\", \"plane_ellipse\" or \"tabulated\"");
    }
    o.finish();
}

ScenarioConfig from_json(const json& root) {
    ScenarioConfig c;
    Obj o(root, "");
    o.opt("name", [&](const json& v, const std::string& w) { c.name = as_string(v, w); });

    o.opt("plant", [&](const json& v, const std::string& w) {
        Obj p(v, w);
        p.opt("inertia_kg_kgm2", [&](const json& x, const std::string& xw) { c.plant.inertia = as_mat6(x, xw); });
        VFO_VEC6(p, "linear_damping_si", c.plant.linear_damping);
        VFO_VEC6(p, "actuation", c.plant.actuation);
        p.opt("coriolis", [&](const json& x, const std::string& xw) { c.plant.coriolis = as_bool(x, xw); });
        p.opt("disturbance_global", [&](const json& arr, const std::string& aw) {
            if (!arr.is_array()) throw ParseError(aw, "expected an array");
            c.plant.disturbance.clear();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                SinusoidTerm s;
                Obj t(arr[i], index(aw, i));
                VFO_INT(t, "dof", s.dof);
                VFO_NUM(t, "amplitude_n_nm", s.amplitude);
                VFO_NUM(t, "frequency_rad_s", s.frequency);
                VFO_NUM(t, "phase_rad", s.phase);
                t.finish();
                c.plant.disturbance.push_back(s);
            }
        });
        p.finish();
    });

    o.opt("path", [&](const json& v, const std::string& w) {
        Obj p(v, w);
        p.opt("shape", [&](const json& x, const std::string& xw) { parse_shape(x, xw, c.path); });
        VFO_INT(p, "direction", c.path.direction);
        VFO_INT(p, "strategy", c.path.strategy);
        VFO_NUM(p, "speed_m_s", c.path.speed);
        p.opt("bounds", [&](const json& x, const std::string& xw) {
            Obj b(x, xw);
            VFO_NUM(b, "gradient_lower", c.path.bounds.gradient_lower);
            VFO_NUM(b, "gradient_upper", c.path.bounds.gradient_upper);
            VFO_NUM(b, "hessian_upper", c.path.bounds.hessian_upper);
            VFO_NUM(b, "collinearity_floor", c.path.bounds.collinearity_floor);
            VFO_NUM(b, "planar_tangent_floor", c.path.bounds.planar_tangent_floor);
            b.finish();
        });
        p.finish();
    });

    o.opt("vfo", [&](const json& v, const std::string& w) {
        Obj p(v, w);
        VFO_NUM(p, "k_p_1_s", c.vfo.k_p);
        VFO_NUM(p, "k_theta_1_s", c.vfo.k_theta);
        VFO_NUM(p, "k_psi_1_s", c.vfo.k_psi);
        VFO_NUM(p, "k_phi_1_s", c.vfo.k_phi);
        VFO_NUM(p, "delta_p", c.vfo.delta_p);
        VFO_NUM(p, "delta_o", c.vfo.delta_o);
        p.finish();
    });

    o.opt("adr", [&](const json& v, const std::string& w) {
        Obj p(v, w);
        VFO_VEC6(p, "k_1_s", c.adr.k);
        VFO_VEC6(p, "b_hat_si", c.adr.b_hat);
        VFO_VEC6(p, "observer_bandwidth_rad_s", c.observer_bandwidths);
        p.finish();
    });

    VFO_NUM(o, "inhibit_until_s", c.inhibit_until);
    o.opt("inhibition", [&](const json& v, const std::string& w) {
        const std::string s = as_string(v, w);
        if (s == "force") c.inhibition = Inhibition::Force;
        else if (s == "force_and_command") c.inhibition = Inhibition::ForceAndCommand;
        else throw ParseError(w, "expected \"force\" or \"force_and_command\"");
    });
    VFO_NUM(o, "freeze_epsilon_m2_s2", c.freeze_epsilon);

    o.opt("limits", [&](const json& v, const std::string& w) {
        Obj p(v, w);
        p.opt("enabled", [&](const json& x, const std::string& xw) { c.limits_enabled = as_bool(x, xw); });
        VFO_VEC6(p, "magnitude_si", c.limits.magnitude);
        VFO_VEC6(p, "rate_si_s", c.limits.rate);
        p.opt("until_s", [&](const json& x, const std::string& xw) {
            c.limits_until = x.is_null() ? std::numeric_limits<double>::infinity() : as_double(x, xw);
        });
        p.finish();
    });

    VFO_VEC6(o, "initial_eta_m_rad", c.initial_eta);
    VFO_VEC6(o, "initial_nu_si", c.initial_nu);
    VFO_NUM(o, "horizon_s", c.horizon);
    VFO_NUM(o, "step_s", c.step);
    o.opt("metric_window_s", [&](const json& v, const std::string& w) {
        const Vec2 win = as_vector<2>(v, w);
        c.metric_t1 = win(0);
        c.metric_t2 = win(1);
    });
    VFO_NUM(o, "singularity_margin_rad", c.singularity_margin);
    o.finish();
    return c;
}

#undef VFO_NUM
#undef VFO_INT
#undef VFO_VEC6

template <typename V>
json vec(const V& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json surface_json(const SurfaceTerms& s) {
    json mon = json::array();
    for (const auto& m : s.monomials) mon.push_back({{"coefficient", m.coefficient}, {"powers", m.powers}});
    json trig = json::array();
    for (const auto& t : s.trig) {
        trig.push_back({{"coefficient", t.coefficient},
                        {"kind", t.kind == TrigTerm::Kind::Sin ? "sin" : "cos"},
                        {"axis", t.axis},
                        {"frequency_rad_m", t.frequency},
                        {"phase_rad", t.phase}});
    }
    return {{"constant", s.constant}, {"monomials", mon}, {"trig", trig}};
}

json to_json(const ScenarioConfig& c) {
    json inertia = json::array();
    for (int r = 0; r < 6; ++r) inertia.push_back(vec(c.plant.inertia.row(r).transpose().eval()));
    json dist = json::array();
    for (const auto& d : c.plant.disturbance) {
        dist.push_back({{"dof", d.dof},
                        {"amplitude_n_nm", d.amplitude},
                        {"frequency_rad_s", d.frequency},
                        {"phase_rad", d.phase}});
    }

    json shape;
    if (const auto* h = std::get_if<HelixPath>(&c.path.shape)) {
        shape = {{"type", "helix"}, {"amplitude_m", h->amplitude}, {"wavenumber_rad_m", h->wavenumber}};
    } else if (const auto* e = std::get_if<PlaneEllipsePath>(&c.path.shape)) {
        shape = {{"type", "plane_ellipse"},
                 {"semi_x_m", e->semi_x},
                 {"semi_y_m", e->semi_y},
                 {"plane_normal", vec(e->plane_normal)},
                 {"plane_offset_m", e->plane_offset}};
    } else {
        const auto& t = std::get<TabulatedPath>(c.path.shape);
        shape = {{"type", "tabulated"}, {"s1", surface_json(t.s1)}, {"s2", surface_json(t.s2)}};
    }
    const PathBounds& b = c.path.bounds;

    return {
        {"name", c.name},
        {"plant",
         {{"inertia_kg_kgm2", inertia},
          {"linear_damping_si", vec(c.plant.linear_damping)},
          {"actuation", vec(c.plant.actuation)},
          {"coriolis", c.plant.coriolis},
          {"disturbance_global", dist}}},
        {"path",
         {{"shape", shape},
          {"direction", c.path.direction},
          {"strategy", c.path.strategy},
          {"speed_m_s", c.path.speed},
          {"bounds",
           {{"gradient_lower", b.gradient_lower},
            {"gradient_upper", b.gradient_upper},
            {"hessian_upper", b.hessian_upper},
            {"collinearity_floor", b.collinearity_floor},
            {"planar_tangent_floor", b.planar_tangent_floor}}}}},
        {"vfo",
         {{"k_p_1_s", c.vfo.k_p},
          {"k_theta_1_s", c.vfo.k_theta},
          {"k_psi_1_s", c.vfo.k_psi},
          {"k_phi_1_s", c.vfo.k_phi},
          {"delta_p", c.vfo.delta_p},
          {"delta_o", c.vfo.delta_o}}},
        {"adr",
         {{"k_1_s", vec(c.adr.k)},
          {"b_hat_si", vec(c.adr.b_hat)},
          {"observer_bandwidth_rad_s", vec(c.observer_bandwidths)}}},
        {"inhibit_until_s", c.inhibit_until},
        {"inhibition", c.inhibition == Inhibition::Force ? "force" : "force_and_command"},
        {"freeze_epsilon_m2_s2", c.freeze_epsilon},
        {"limits",
         {{"enabled", c.limits_enabled},
          {"magnitude_si", vec(c.limits.magnitude)},
          {"rate_si_s", vec(c.limits.rate)},
          {"until_s", std::isfinite(c.limits_until) ? json(c.limits_until) : json(nullptr)}}},
        {"initial_eta_m_rad", vec(c.initial_eta)},
        {"initial_nu_si", vec(c.initial_nu)},
        {"horizon_s", c.horizon},
        {"step_s", c.step},
        {"metric_window_s", {c.metric_t1, c.metric_t2}},
        {"singularity_margin_rad", c.singularity_margin},
    };
}

void validate(const ScenarioConfig& c) {
    try {
        c.check();
        build_plant(c.plant);
        VfoAdrController(build_path(c.path), build_controller_settings(c));
    } catch (const InvalidArgument& e) {
        throw ValidationError(e.what());
    }
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte; ++i) line += text[i] == '\n';
    return line;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_of(text, e.byte)), "malformed JSON");
    }
    ScenarioConfig c = from_json(root);
    validate(c);
    return c;
}

ScenarioConfig parse_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseError(file.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ScenarioConfig load_config(const std::string& name_or_path) {
    if (name_or_path == "scenario_a") return scenario_a();
    if (name_or_path == "scenario_b") return scenario_b();
    return parse_config(name_or_path);
}

std::string canonical_json(const ScenarioConfig& config) { return to_json(config).dump(); }

std::string pretty_json(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const ScenarioConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json(config))));
    return buf;
}

}  // namespace vfo_adr
