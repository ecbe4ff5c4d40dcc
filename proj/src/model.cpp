#include "clqr/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace clqr {

using matkit::chol_lower;
using matkit::fro_norm;
using matkit::kron;
using matkit::lu_solve;
using matkit::mat_exp;
using matkit::transpose;

void certify_spec(const ClqrSpec& spec, const LtiModel& model) {
    const std::size_t n = model.n(), m = model.m();
    if (model.B.rows() != n) throw DimensionMismatch("B row count does not match A");
    if (spec.Q.rows() != n || spec.Q.cols() != n)
        throw DimensionMismatch("Q must be n x n");
    if (spec.R.rows() != m || spec.R.cols() != m)
        throw DimensionMismatch("R must be m x m");
    if (spec.N < 1) throw DimensionMismatch("horizon N must be >= 1");
    chol_lower(spec.Q);
    chol_lower(spec.R);
    if (spec.terminal.kind == TerminalKind::Explicit) {
        if (spec.terminal.explicit_P.rows() != n || spec.terminal.explicit_P.cols() != n)
            throw DimensionMismatch("explicit P must be n x n");
        chol_lower(spec.terminal.explicit_P);
    }
    const std::size_t l = spec.Eu.rows();
    if (spec.Ex.rows() != l || spec.c.size() != l)
        throw DimensionMismatch("Eu, Ex, c must share their row count");
    if (l > 0 && (spec.Eu.cols() != m || spec.Ex.cols() != n))
        throw DimensionMismatch("Eu must be l x m and Ex must be l x n");
    for (double ci : spec.c)
        if (!std::isfinite(ci)) throw DimensionMismatch("constraint bound c must be finite");
}

LtiModel zoh_discretize(const LtiModel& model, double Ts) {
    if (model.time_domain != TimeDomain::Continuous)
        throw WrongDomain("zoh_discretize: model is already discrete");
    if (!(Ts > 0.0)) throw std::invalid_argument("zoh_discretize: Ts must be positive");
    const std::size_t n = model.n(), m = model.m();
    Mat aug(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = model.A(i, j) * Ts;
        for (std::size_t j = 0; j < m; ++j) aug(i, n + j) = model.B(i, j) * Ts;
    }
    const Mat e = mat_exp(aug);
    LtiModel out;
    out.A = e.block(0, 0, n, n);
    out.B = e.block(0, n, n, m);
    out.time_domain = TimeDomain::Discrete;
    out.sample_time = Ts;
    return out;
}

StabilityCertificate check_schur_stability(const Mat& A) {
    const std::size_t n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("check_schur_stability: matrix not square");
    const Mat at = transpose(A);
    const Mat sys = Mat::identity(n * n) - kron(at, at);
    Vec rhs(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i * n + i] = 1.0;

    StabilityCertificate cert;
    Vec x;
    try {
        x = lu_solve(sys, rhs);
    } catch (const matkit::Singular& e) {
        // Singular Kronecker system: some eigenvalue product sits on the unit
        // circle, so A is certainly not Schur-stable. Distinguish strictly
        // unstable from marginal by the growth of A^512.
        Mat power = A;
        for (int s = 0; s < 9; ++s) power = power * power;
        const double growth = fro_norm(power);
        if (!std::isfinite(growth) || growth > 1e8) {
            cert.verdict = StabilityVerdict::NotSchurStable;
            cert.note = std::string("Kronecker system singular and matrix powers diverge: ") +
                        e.what();
        } else {
            cert.verdict = StabilityVerdict::Marginal;
            cert.note = std::string("Kronecker system singular: ") + e.what();
        }
        return cert;
    }
    Mat X(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) X(i, j) = x[i * n + j];
    X = 0.5 * (X + transpose(X));
    cert.witness = X;

    const Mat defect = at * X * A - X + Mat::identity(n);
    if (fro_norm(defect) > 1e-8 * std::max(fro_norm(X), 1.0)) {
        cert.verdict = StabilityVerdict::Marginal;
        cert.note = "Lyapunov residual too large; system near the unit circle";
        return cert;
    }
    try {
        chol_lower(X);
        cert.verdict = StabilityVerdict::SchurStable;
    } catch (const matkit::NotPositiveDefinite& e) {
        cert.verdict = StabilityVerdict::NotSchurStable;
        cert.note = std::string("Lyapunov solution not positive definite: ") + e.what();
    }
    return cert;
}

// ---- model file format ----
//
// UTF-8 text. `#` starts a comment line. Matrix section: `NAME rows cols`
// followed by `rows` lines of `cols` numbers. Vector section: `c len` plus
// one line. Scalars: `N <int>`, `Ts <float>`, `domain discrete|continuous`.
// Sections in any order; duplicates are an error.

namespace {

struct Tok {
    std::string text;
    int col;
};

std::vector<Tok> tokenize(const std::string& line) {
    std::vector<Tok> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || line[i] == '#') break;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        toks.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return toks;
}

double parse_number(const Tok& t, int line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t.text, &used);
    } catch (const std::exception&) {
        throw ParseError(line_no, t.col, "expected a number, got '" + t.text + "'");
    }
    if (used != t.text.size())
        throw ParseError(line_no, t.col, "trailing characters in number '" + t.text + "'");
    return v;
}

long parse_integer(const Tok& t, int line_no) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(t.text, &used);
    } catch (const std::exception&) {
        throw ParseError(line_no, t.col, "expected an integer, got '" + t.text + "'");
    }
    if (used != t.text.size())
        throw ParseError(line_no, t.col, "trailing characters in integer '" + t.text + "'");
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ModelBundle parse_model_text(std::string_view text) {
    std::map<std::string, Mat> mats;
    std::map<std::string, int> seen;
    Vec cvec;
    bool have_c = false, have_n = false, have_ts = false, have_domain = false;
    long horizon = 0;
    double ts = 0.0;
    TimeDomain domain = TimeDomain::Discrete;

    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    std::vector<std::pair<int, std::vector<Tok>>> lines;
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = tokenize(line);
        if (!toks.empty()) lines.push_back({line_no, std::move(toks)});
    }

    const int eof_line = line_no + 1;
    std::size_t li = 0;
    auto next_data_line = [&](int rows_needed_line) -> std::pair<int, std::vector<Tok>>& {
        if (li >= lines.size())
            throw ParseError(rows_needed_line, 1, "unexpected end of file inside a section");
        return lines[li++];
    };

    while (li < lines.size()) {
        auto& [lno, toks] = lines[li++];
        const std::string& name = toks[0].text;
        if (seen.count(name))
            throw ParseError(lno, toks[0].col,
                             "duplicate section '" + name + "' (first at line " +
                                 std::to_string(seen[name]) + ")");
        seen[name] = lno;

        if (name == "A" || name == "B" || name == "Q" || name == "R" || name == "P" ||
            name == "Eu" || name == "Ex") {
            if (toks.size() != 3)
                throw ParseError(lno, toks[0].col, "section '" + name + "' needs rows and cols");
            const long rows = parse_integer(toks[1], lno);
            const long cols = parse_integer(toks[2], lno);
            if (rows < 0 || cols < 0)
                throw ParseError(lno, toks[1].col, "negative dimension in section '" + name + "'");
            Mat m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
            for (long r = 0; r < rows; ++r) {
                auto& [dlno, dtoks] = next_data_line(lno);
                if (static_cast<long>(dtoks.size()) != cols)
                    throw ParseError(dlno, 1,
                                     "expected " + std::to_string(cols) + " numbers, got " +
                                         std::to_string(dtoks.size()));
                for (long cidx = 0; cidx < cols; ++cidx)
                    m(static_cast<std::size_t>(r), static_cast<std::size_t>(cidx)) =
                        parse_number(dtoks[static_cast<std::size_t>(cidx)], dlno);
            }
            mats[name] = std::move(m);
        } else if (name == "c") {
            if (toks.size() != 2) throw ParseError(lno, toks[0].col, "section 'c' needs a length");
            const long len = parse_integer(toks[1], lno);
            auto& [dlno, dtoks] = next_data_line(lno);
            if (static_cast<long>(dtoks.size()) != len)
                throw ParseError(dlno, 1,
                                 "expected " + std::to_string(len) + " numbers, got " +
                                     std::to_string(dtoks.size()));
            cvec.resize(static_cast<std::size_t>(len));
            for (long i = 0; i < len; ++i)
                cvec[static_cast<std::size_t>(i)] = parse_number(dtoks[static_cast<std::size_t>(i)], dlno);
            have_c = true;
        } else if (name == "N") {
            if (toks.size() != 2) throw ParseError(lno, toks[0].col, "section 'N' needs a value");
            horizon = parse_integer(toks[1], lno);
            if (horizon < 1) throw ParseError(lno, toks[1].col, "N must be >= 1");
            have_n = true;
        } else if (name == "Ts") {
            if (toks.size() != 2) throw ParseError(lno, toks[0].col, "section 'Ts' needs a value");
            ts = parse_number(toks[1], lno);
            have_ts = true;
        } else if (name == "domain") {
            if (toks.size() != 2)
                throw ParseError(lno, toks[0].col, "section 'domain' needs a value");
            if (toks[1].text == "discrete") domain = TimeDomain::Discrete;
            else if (toks[1].text == "continuous") domain = TimeDomain::Continuous;
            else throw ParseError(lno, toks[1].col, "domain must be 'discrete' or 'continuous'");
            have_domain = true;
        } else {
            throw ParseError(lno, toks[0].col, "unknown section '" + name + "'");
        }
    }

    for (const char* req : {"A", "B", "Q", "R"})
        if (!mats.count(req)) throw ParseError(eof_line, 1, std::string("missing section ") + req);
    if (!have_n) throw ParseError(eof_line, 1, "missing section N");

    ModelBundle out;
    out.model.A = mats["A"];
    out.model.B = mats["B"];
    out.model.time_domain = have_domain ? domain : TimeDomain::Discrete;
    if (have_ts) out.model.sample_time = ts;
    if (out.model.A.rows() != out.model.A.cols())
        throw DimensionMismatch("A must be square");
    const std::size_t n = out.model.n(), m = out.model.m();

    out.spec.Q = mats["Q"];
    out.spec.R = mats["R"];
    out.spec.N = static_cast<int>(horizon);
    out.spec.terminal =
        mats.count("P") ? TerminalPolicy::explicit_p(mats["P"]) : TerminalPolicy::dare();

    const bool have_eu = mats.count("Eu"), have_ex = mats.count("Ex");
    if (have_eu != have_ex || have_eu != have_c)
        throw DimensionMismatch("constraint sections Eu, Ex, c must appear together");
    if (have_eu) {
        out.spec.Eu = mats["Eu"];
        out.spec.Ex = mats["Ex"];
        out.spec.c = cvec;
    } else {
        out.spec.Eu = Mat(0, m);
        out.spec.Ex = Mat(0, n);
    }
    if (have_ts && out.model.time_domain == TimeDomain::Continuous) out.default_ts = ts;

    certify_spec(out.spec, out.model);
    return out;
}

std::string save_model_text(const LtiModel& model, const ClqrSpec& spec) {
    std::ostringstream out;
    auto dump = [&](const char* name, const Mat& m) {
        out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j)
                out << (j ? " " : "") << format_double(m(i, j));
            out << '\n';
        }
    };
    out << "domain "
        << (model.time_domain == TimeDomain::Discrete ? "discrete" : "continuous") << '\n';
    dump("A", model.A);
    dump("B", model.B);
    dump("Q", spec.Q);
    dump("R", spec.R);
    if (spec.terminal.kind == TerminalKind::Explicit) dump("P", spec.terminal.explicit_P);
    if (spec.l() > 0) {
        dump("Eu", spec.Eu);
        dump("Ex", spec.Ex);
        out << "c " << spec.c.size() << '\n';
        for (std::size_t i = 0; i < spec.c.size(); ++i)
            out << (i ? " " : "") << format_double(spec.c[i]);
        out << '\n';
    }
    out << "N " << spec.N << '\n';
    if (model.sample_time > 0.0) out << "Ts " << format_double(model.sample_time) << '\n';
    return out.str();
}

ModelBundle load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_text(buf.str());
}

void save_model(const std::filesystem::path& path, const LtiModel& model, const ClqrSpec& spec) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path.string());
    out << save_model_text(model, spec);
}

namespace {

// Stage-wise box |u_k| <= bound as stacked +/- identity rows.
void set_input_box(ClqrSpec& spec, std::size_t n, std::size_t m, const Vec& bound) {
    spec.Eu = Mat(2 * m, m);
    spec.Ex = Mat(2 * m, n);
    spec.c.assign(2 * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        spec.Eu(i, i) = 1.0;
        spec.Eu(m + i, i) = -1.0;
        spec.c[i] = bound[i];
        spec.c[m + i] = bound[i];
    }
}

}  // namespace

ModelBundle builtin_system(const std::string& name) {
    ModelBundle out;
    if (name == "schur-stable") {
        out.model.A = Mat{{0.7, -0.1, 0.0, 0.0},
                          {0.2, -0.5, 0.1, 0.0},
                          {0.0, 0.1, 0.1, 0.0},
                          {0.5, 0.0, 0.5, 0.5}};
        out.model.B = Mat{{0.0, 0.1}, {0.1, 1.0}, {0.1, 0.0}, {0.0, 0.0}};
        out.model.time_domain = TimeDomain::Discrete;
        out.spec.Q = Mat::diag({10.0, 20.0, 30.0, 40.0});
        out.spec.R = Mat::diag({10.0, 20.0});
        out.spec.terminal = TerminalPolicy::dare();
        out.spec.N = 10;
        set_input_box(out.spec, 4, 2, {0.5, 0.5});
        return out;
    }
    if (name == "pendulum") {
        const double g = 9.8067, b = 1.0, l = 0.21;
        out.model.A = Mat{{0.0, 1.0, 0.0, 0.0},
                          {3.0 * g / (2.0 * l), -b, 0.0, 0.0},
                          {0.0, 0.0, 0.0, 1.0},
                          {0.0, 0.0, 0.0, 0.0}};
        out.model.B = Mat{{0.0}, {3.0 / (2.0 * l)}, {0.0}, {1.0}};
        out.model.time_domain = TimeDomain::Continuous;
        out.spec.Q = Mat::diag({1000.0, 1.0, 100.0, 1.0});
        out.spec.R = Mat::diag({10.0});
        out.spec.terminal = TerminalPolicy::dare();
        out.spec.N = 10;
        set_input_box(out.spec, 4, 1, {10.0});
        out.default_ts = 0.02;
        return out;
    }
    throw UnknownName("no built-in system named '" + name + "'");
}

std::vector<std::string> builtin_names() { return {"schur-stable", "pendulum"}; }

}  // namespace clqr
