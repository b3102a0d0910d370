#include "bethe/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bethe {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ValidationError("malformed number '" + s + "'");
    return v;
}

}  // namespace

Scalar parse_scalar(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) throw ValidationError("empty scalar literal");
    if (s.back() != 'i' && s.back() != 'I') return Scalar(parse_double(s), 0.0);

    // pure imaginary or re +- im i; find the sign splitting the two parts,
    // skipping exponent signs and the leading sign
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < body.size(); ++i) {
        const char ch = body[i];
        if ((ch == '+' || ch == '-') && body[i - 1] != 'e' && body[i - 1] != 'E')
            split = i;  // keep the last candidate: re part may itself carry a sign
    }
    if (split == std::string::npos) {
        const std::string im = body.empty() || body == "+" ? "1" : (body == "-" ? "-1" : body);
        return Scalar(0.0, parse_double(im));
    }
    const std::string re = body.substr(0, split);
    std::string im = body.substr(split);
    if (im == "+") im = "1";
    if (im == "-") im = "-1";
    return Scalar(parse_double(re), parse_double(im));
}

std::string format_scalar(Scalar z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

namespace {

struct RawConfig {
    // section -> key -> (value, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> kv;
    std::set<std::string> consumed;

    std::optional<std::string> get(const std::string& sec, const std::string& key) {
        auto s = kv.find(sec);
        if (s == kv.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        consumed.insert(sec + "." + key);
        return k->second.first;
    }

    void reject_unknown() const {
        for (auto& [sec, keys] : kv)
            for (auto& [key, val] : keys)
                if (!consumed.count(sec + "." + key))
                    throw ValidationError("unknown key '" + key + "' in section [" + sec + "]");
    }
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    static const std::set<std::string> kSections{"model", "solver", "task", "output"};
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("unterminated section header", line_no);
            section = trim(t.substr(1, t.size() - 2));
            if (!kSections.count(section))
                throw ParseError("unknown section [" + section + "]", line_no);
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
        if (section.empty()) throw ParseError("key outside any section", line_no);
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        auto& sec = raw.kv[section];
        if (sec.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
        sec[key] = {val, line_no};
    }
    return raw;
}

ParamSet parse_scalar_list(const std::string& s) {
    ParamSet out;
    for (auto& item : split_list(s)) out.push_back(parse_scalar(item));
    return out;
}

Polynomial parse_poly(const std::string& s) {
    Polynomial p;
    p.coeff = parse_scalar_list(s);
    if (p.coeff.empty()) throw ValidationError("empty coefficient list");
    return p;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RawConfig raw = tokenize(text);
    RunConfig cfg;

    // [model]
    if (auto v = raw.get("model", "c")) cfg.model.c = parse_scalar(*v);
    if (auto v = raw.get("model", "mode")) {
        if (*v == "periodic")
            cfg.model.mode = BoundaryMode::periodic;
        else if (*v == "reflection")
            cfg.model.mode = BoundaryMode::reflection;
        else
            throw ValidationError("mode must be periodic or reflection, got '" + *v + "'");
    }
    const auto theta = raw.get("model", "theta");
    const auto l1n = raw.get("model", "lambda1_num");
    const auto l1d = raw.get("model", "lambda1_den");
    const auto l2n = raw.get("model", "lambda2_num");
    const auto l2d = raw.get("model", "lambda2_den");
    const bool custom = l1n || l1d || l2n || l2d;
    if (theta && custom)
        throw ValidationError("theta and lambda coefficient lists are mutually exclusive");
    if (custom) {
        if (!l1n || !l2n)
            throw ValidationError("custom realization needs lambda1_num and lambda2_num");
        cfg.model.realization = Realization::custom;
        cfg.model.lambda1.num = parse_poly(*l1n);
        cfg.model.lambda2.num = parse_poly(*l2n);
        if (l1d) cfg.model.lambda1.den = parse_poly(*l1d);
        if (l2d) cfg.model.lambda2.den = parse_poly(*l2d);
    } else {
        cfg.model.realization = Realization::xxx_inhomogeneous;
        cfg.model.theta = theta ? parse_scalar_list(*theta) : ParamSet{Scalar(0.0), Scalar(0.0)};
    }
    const auto xim = raw.get("model", "xi_minus");
    const auto xip = raw.get("model", "xi_plus");
    if (cfg.model.mode == BoundaryMode::reflection) {
        if (!xim) throw ValidationError("xi_minus required in reflection mode");
        if (!xip) throw ValidationError("xi_plus required in reflection mode");
    }
    if (xim) cfg.model.xi_minus = parse_scalar(*xim);
    if (xip) cfg.model.xi_plus = parse_scalar(*xip);
    cfg.model.validate();

    // [solver]
    if (auto v = raw.get("solver", "n")) cfg.solver.n_roots = static_cast<int>(parse_double(*v));
    if (auto v = raw.get("solver", "seeds")) cfg.solver.seeds = static_cast<int>(parse_double(*v));
    if (auto v = raw.get("solver", "seed_box")) cfg.solver.seed_box = parse_double(*v);
    if (auto v = raw.get("solver", "newton_tol")) cfg.solver.newton_tol = parse_double(*v);
    if (auto v = raw.get("solver", "max_iter"))
        cfg.solver.max_iter = static_cast<int>(parse_double(*v));
    if (auto v = raw.get("solver", "dedup_tol")) cfg.solver.dedup_tol = parse_double(*v);
    if (auto v = raw.get("solver", "rng_seed"))
        cfg.solver.rng_seed = static_cast<std::uint64_t>(parse_double(*v));
    cfg.solver.validate();

    // [task]
    if (auto v = raw.get("task", "methods")) cfg.task.methods = split_list(*v);
    if (auto v = raw.get("task", "tol")) cfg.task.tol = parse_double(*v);
    if (auto v = raw.get("task", "root_index"))
        cfg.task.root_index = static_cast<int>(parse_double(*v));
    if (auto v = raw.get("task", "u_set")) cfg.task.u_set = parse_scalar_list(*v);
    if (auto v = raw.get("task", "offshell_sets"))
        cfg.task.offshell_sets = static_cast<int>(parse_double(*v));
    if (auto v = raw.get("task", "unchecked")) cfg.task.unchecked = (*v == "true" || *v == "1");
    if (auto v = raw.get("task", "bench_n_max"))
        cfg.task.bench_n_max = static_cast<int>(parse_double(*v));
    if (auto v = raw.get("task", "verify_n_max"))
        cfg.task.verify_n_max = static_cast<int>(parse_double(*v));
    if (cfg.task.verify_n_max < 1 || cfg.task.verify_n_max > 4)
        throw ValidationError("verify_n_max must lie in [1, 4]");
    if (cfg.task.bench_n_max < 1 || cfg.task.bench_n_max > kMaxSymSize)
        throw ValidationError("bench_n_max must lie in [1, 6]");

    // [output]
    if (auto v = raw.get("output", "format")) {
        if (*v != "json" && *v != "table")
            throw ValidationError("output format must be json or table");
        cfg.output.format = *v;
    }
    if (auto v = raw.get("output", "path")) cfg.output.path = *v;

    raw.reject_unknown();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace bethe
