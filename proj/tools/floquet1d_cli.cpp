// floquet1d: band structure, isofrequency curves, zero-width stopbands,
// Green kernels and invariant checks for 1D periodic profiles.
//
// Dataset commands print a header block (config hash, units) followed by rows
// in csv or jsonl form. Sweeps never abort on a bad grid point; the point is
// emitted as an error row and the exit code becomes 3.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "floquet/asymptotics.hpp"
#include "floquet/greenfn.hpp"
#include "floquet/isofreq.hpp"
#include "floquet/lyapunov.hpp"
#include "floquet/profile_io.hpp"
#include "floquet/spectrum.hpp"
#include "floquet/verify.hpp"

namespace {

using namespace floquet;

constexpr double pi = 3.14159265358979323846;

// ---------- formatting ----------

using Cell = std::variant<std::monostate, double, long long, std::string, bool>;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out;
}

class Emitter {
public:
    Emitter(bool jsonl, std::vector<std::string> cols)
        : jsonl_(jsonl), cols_(std::move(cols)) {}

    void header(const std::vector<std::pair<std::string, std::string>>& meta) {
        if (jsonl_) {
            std::string line = "{\"record\":\"header\"";
            for (const auto& [k, v] : meta)
                line += ",\"" + json_escape(k) + "\":\"" + json_escape(v) + "\"";
            line += "}";
            std::cout << line << "\n";
        } else {
            for (const auto& [k, v] : meta)
                std::cout << "# " << k << ": " << v << "\n";
            for (std::size_t i = 0; i < cols_.size(); ++i)
                std::cout << (i ? "," : "") << cols_[i];
            std::cout << "\n";
        }
    }

    std::size_t ncols() const { return cols_.size(); }

    void row(const std::vector<Cell>& cells) {
        if (jsonl_) {
            std::string line = "{";
            bool first = true;
            for (std::size_t i = 0; i < cols_.size() && i < cells.size(); ++i) {
                if (std::holds_alternative<std::monostate>(cells[i]))
                    continue;
                if (!first)
                    line += ",";
                first = false;
                line += "\"" + cols_[i] + "\":" + json_cell(cells[i]);
            }
            line += "}";
            std::cout << line << "\n";
        } else {
            for (std::size_t i = 0; i < cols_.size(); ++i) {
                if (i)
                    std::cout << ",";
                if (i < cells.size())
                    std::cout << csv_cell(cells[i]);
            }
            std::cout << "\n";
        }
    }

private:
    static std::string csv_cell(const Cell& c) {
        if (const double* d = std::get_if<double>(&c))
            return fmt_double(*d);
        if (const long long* n = std::get_if<long long>(&c))
            return std::to_string(*n);
        if (const std::string* s = std::get_if<std::string>(&c))
            return *s; // no separator characters in our strings
        if (const bool* b = std::get_if<bool>(&c))
            return *b ? "true" : "false";
        return "";
    }
    static std::string json_cell(const Cell& c) {
        if (const double* d = std::get_if<double>(&c))
            return std::isfinite(*d) ? fmt_double(*d) : std::string("null");
        if (const long long* n = std::get_if<long long>(&c))
            return std::to_string(*n);
        if (const std::string* s = std::get_if<std::string>(&c))
            return "\"" + json_escape(*s) + "\"";
        if (const bool* b = std::get_if<bool>(&c))
            return *b ? "true" : "false";
        return "null";
    }

    bool jsonl_;
    std::vector<std::string> cols_;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---------- ranges ----------

struct Range {
    double a = 0.0, b = 0.0;
    int n = 1;
};

Range parse_range(const std::string& spec, const char* flag) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    auto num = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(std::string(flag) + ": cannot parse '" + s + "' as a number");
        }
    };
    Range r;
    if (parts.size() == 1) {
        r.a = r.b = num(parts[0]);
        r.n = 1;
    } else if (parts.size() == 3) {
        r.a = num(parts[0]);
        r.b = num(parts[1]);
        const double nn = num(parts[2]);
        r.n = static_cast<int>(nn);
        if (r.n < 1 || double(r.n) != nn)
            throw ConfigError(std::string(flag) + ": point count must be a positive integer");
        if (r.n > 1 && !(r.b > r.a))
            throw ConfigError(std::string(flag) + ": range needs b > a when n > 1");
    } else {
        throw ConfigError(std::string(flag) + ": expected 'x' or 'a:b:n', got '" + spec + "'");
    }
    return r;
}

std::vector<double> linspace(const Range& r) {
    std::vector<double> v(r.n);
    if (r.n == 1) {
        v[0] = r.a;
        return v;
    }
    const double step = (r.b - r.a) / (r.n - 1);
    for (int i = 0; i < r.n; ++i)
        v[i] = r.a + i * step;
    v.back() = r.b;
    return v;
}

std::string range_str(const Range& r) {
    return fmt_double(r.a) + ":" + fmt_double(r.b) + ":" + std::to_string(r.n);
}

// ---------- shared run state ----------

struct Common {
    std::string profile_path;
    std::string omega_s, k_s, K_s;
    double tol = 1e-12;
    std::string scheme = "magnus4";
    std::string format = "csv";
    int jobs = 1;
    bool physical = false;
    int terms = 0;    // isofreq
    int branches = 4; // band
    int grid = 65;    // green
};

struct Setup {
    MaterialProfile p;
    QuadratureConfig cfg;
    double T = 1.0;
    std::uint64_t profile_hash = 0;
};

Setup load_setup(const Common& c) {
    if (c.profile_path.empty())
        throw ConfigError("--profile is required");
    std::ifstream f(c.profile_path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot open profile file: " + c.profile_path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    QuadratureConfig cfg;
    if (!(c.tol > 0.0))
        throw ConfigError("--tol must be positive");
    cfg.abs_tol = cfg.rel_tol = c.tol;
    if (c.scheme == "midpoint")
        cfg.scheme = Scheme::Midpoint;
    else if (c.scheme == "magnus4")
        cfg.scheme = Scheme::Magnus4;
    else
        throw ConfigError("--scheme must be midpoint or magnus4");
    Setup s{parse_profile(text), cfg, 1.0, fnv1a(text)};
    s.T = s.p.period_scale();
    return s;
}

// config hash covers everything that determines the dataset (format and jobs
// deliberately excluded: parallel and serial runs must be byte-identical)
std::uint64_t config_hash(const std::string& sub, const Setup& s, const Common& c,
                          const Range& wr, const Range& kr, const Range& Kr) {
    std::ostringstream os;
    os << sub << "|" << hex64(s.profile_hash) << "|w:" << range_str(wr)
       << "|k:" << range_str(kr) << "|K:" << range_str(Kr) << "|tol:" << c.tol
       << "|scheme:" << c.scheme << "|physical:" << (c.physical ? 1 : 0)
       << "|terms:" << c.terms << "|branches:" << c.branches << "|grid:" << c.grid;
    return fnv1a(os.str());
}

std::vector<std::pair<std::string, std::string>>
base_meta(const std::string& sub, const Setup& s, const Common& c, const Range& wr,
          const Range& kr, const Range& Kr) {
    std::vector<std::pair<std::string, std::string>> m;
    m.emplace_back("tool", "floquet1d");
    m.emplace_back("subcommand", sub);
    m.emplace_back("profile", c.profile_path);
    m.emplace_back("profile_hash", hex64(s.profile_hash));
    m.emplace_back("config_hash", hex64(config_hash(sub, s, c, wr, kr, Kr)));
    m.emplace_back("period", fmt_double(s.T));
    m.emplace_back("units", c.physical ? "physical (omega, k, K, y divided/multiplied by the period)"
                                       : "nondimensional (omega*T, k*T, K per cell, y in [0,1])");
    m.emplace_back("omega", range_str(wr));
    m.emplace_back("k", range_str(kr));
    m.emplace_back("K", range_str(Kr));
    return m;
}

template <class F>
bool parallel_cells(int jobs, std::size_t n, std::size_t ncols,
                    std::vector<std::vector<Cell>>& rows, F&& fill) {
    // fill(i) -> row; failures become rows with only the trailing `error`
    // column set. Assembly is by index, so the dataset is independent of the
    // thread count.
    rows.assign(n, {});
    std::atomic<bool> num_fail{false};
    auto work = [&](std::size_t i) {
        try {
            rows[i] = fill(i);
            // fill() reports per-point failures by ending the row with the
            // error message; those count toward the exit code too
            if (!rows[i].empty() && std::holds_alternative<std::string>(rows[i].back()))
                num_fail = true;
        } catch (const std::exception& e) {
            rows[i].assign(ncols, std::monostate{});
            rows[i].back() = std::string(e.what());
            num_fail = true;
        }
    };
    if (jobs == 0)
        jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i)
            work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < n;)
                    work(i);
            });
        for (auto& th : pool)
            th.join();
    }
    return num_fail.load();
}

// ---------- subcommands ----------

int cmd_delta_map(const Common& c) {
    const Setup s = load_setup(c);
    const double in = c.physical ? s.T : 1.0, out = 1.0 / in;
    const Range wr = parse_range(c.omega_s.empty() ? "0:10:201" : c.omega_s, "--omega");
    const Range kr = parse_range(c.k_s.empty() ? "0" : c.k_s, "--k");
    const Range Kr{0, 0, 1};
    const auto wg = linspace(wr), kg = linspace(kr);

    Emitter em(c.format == "jsonl",
               {"omega", "k", "delta", "class", "origin", "K_re", "K_im", "error"});
    em.header(base_meta("delta-map", s, c, wr, kr, Kr));

    const std::size_t n = wg.size() * kg.size();
    std::vector<std::vector<Cell>> rows;
    const bool failed = parallel_cells(c.jobs, n, em.ncols(), rows, [&](std::size_t i) -> std::vector<Cell> {
        const double w = wg[i / kg.size()] * in, k = kg[i % kg.size()] * in;
        try {
            const auto r = delta(s.p, w * w, k * k, s.cfg);
            return {w * out,
                    k * out,
                    r.delta.real(),
                    std::string(band_class_name(r.classification)),
                    r.origin,
                    r.K.real() * out,
                    r.K.imag() * out,
                    std::monostate{}};
        } catch (const NumericalError& e) {
            return {w * out, k * out,      std::monostate{}, std::monostate{},
                    std::monostate{}, std::monostate{}, std::monostate{},
                    std::string(e.what())};
        }
    });
    for (const auto& r : rows)
        em.row(r);
    return failed ? 3 : 0;
}

int cmd_band(const Common& c) {
    const Setup s = load_setup(c);
    const double in = c.physical ? s.T : 1.0, out = 1.0 / in;
    const Range kr = parse_range(c.k_s.empty() ? "0" : c.k_s, "--k");
    if (kr.n != 1)
        throw ConfigError("band runs at a single k; pass --k x");
    const Range Kr = parse_range(c.K_s.empty() ? "0:3.141592653589793:65" : c.K_s, "--K");
    const Range wr{0, 0, 1};
    if (c.branches < 1)
        throw ConfigError("--branches must be >= 1");
    if (Kr.a * in < 0.0 || Kr.b * in > pi + 1e-9)
        throw ConfigError("--K must lie within [0, pi] per cell for band");
    const double k = kr.a * in;
    const auto Kg = linspace(Kr);

    Emitter em(c.format == "jsonl",
               {"kind", "k", "K", "n", "omega", "monotone_ok", "parity", "tangent", "band",
                "omega_lo", "omega_hi", "im_K", "omega_ext", "im_K_max", "curvature",
                "error"});
    em.header(base_meta("band", s, c, wr, kr, Kr));

    const std::size_t nK = Kg.size();
    const std::size_t nc = static_cast<std::size_t>(c.branches) * nK;
    std::vector<double> omega(nc, std::nan(""));
    // one scan ceiling for all K cells: branches are monotone in K, so the
    // grid endpoints bound the top requested branch
    double cap = 1.0;
    try {
        cap = 1.001 * std::max(branch_omega(s.p, Kg.front() * in, k, c.branches, s.cfg),
                               branch_omega(s.p, Kg.back() * in, k, c.branches, s.cfg)) +
              0.1;
    } catch (const NumericalError&) {
        // cells grow their own ceiling below
    }
    std::vector<std::vector<Cell>> cell_err;
    bool failed =
        parallel_cells(c.jobs, nK, 1, cell_err, [&](std::size_t iK) -> std::vector<Cell> {
            const double K = Kg[iK] * in;
            const bool origin_case = (K == 0.0 && k == 0.0); // branch 1 is omega = 0
            const std::size_t need = static_cast<std::size_t>(c.branches) - (origin_case ? 1 : 0);
            double local_cap = cap;
            std::vector<double> roots;
            for (int attempt = 0; attempt < 4; ++attempt) {
                roots = floquet_branches(s.p, K, k, local_cap, s.cfg);
                if (roots.size() >= need)
                    break;
                local_cap *= 1.4;
            }
            if (roots.size() < need)
                throw ScanIncomplete("branch scan ceiling too low at K = " + std::to_string(K));
            for (int n = 1; n <= c.branches; ++n)
                omega[std::size_t(n - 1) * nK + iK] =
                    origin_case ? (n == 1 ? 0.0 : roots[n - 2]) : roots[n - 1];
            return {};
        });
    // self-check: omega_n(K) rises on [0,pi] for odd n, falls for even n
    double w_max = 0.0;
    for (int n = 1; n <= c.branches; ++n) {
        for (std::size_t j = 0; j < nK; ++j) {
            const std::size_t i = std::size_t(n - 1) * nK + j;
            const double K = Kg[j] * in;
            if (std::isnan(omega[i])) {
                std::string msg = "branch scan failed";
                if (!cell_err[j].empty())
                    if (const std::string* sp = std::get_if<std::string>(&cell_err[j][0]))
                        msg = *sp;
                em.row({std::string("branch"), k * out, K * out, static_cast<long long>(n),
                        std::monostate{}, std::monostate{}, std::monostate{},
                        std::monostate{}, std::monostate{}, std::monostate{},
                        std::monostate{}, std::monostate{}, std::monostate{},
                        std::monostate{}, std::monostate{}, msg});
                continue;
            }
            w_max = std::max(w_max, omega[i]);
            bool ok = true;
            if (j > 0 && !std::isnan(omega[i - 1])) {
                const double diff = (omega[i] - omega[i - 1]) * (n % 2 ? 1.0 : -1.0);
                ok = diff >= -1e-9 * (1.0 + std::abs(omega[i]));
            }
            em.row({std::string("branch"), k * out, K * out, static_cast<long long>(n),
                    omega[i] * out, ok});
        }
    }

    try {
        for (const auto& e : band_edges(s.p, k, w_max + 1e-9, s.cfg))
            em.row({std::string("edge"), k * out, std::monostate{}, std::monostate{},
                    e.omega * out, std::monostate{}, static_cast<long long>(e.parity),
                    e.tangent});
        const auto gaps = stopband_intervals(s.p, k, w_max + 1e-9, s.cfg);
        const int nprof = std::min<int>(static_cast<int>(gaps.size()), 8);
        for (int b = 1; b <= nprof; ++b) {
            const auto prof = stopband_profile(s.p, k, b, s.cfg);
            for (const auto& [w, imK] : prof.samples)
                em.row({std::string("gap"), k * out, std::monostate{}, std::monostate{},
                        w * out, std::monostate{}, std::monostate{}, std::monostate{},
                        static_cast<long long>(b), std::monostate{}, std::monostate{},
                        imK * out});
            em.row({std::string("gap_summary"), k * out, std::monostate{}, std::monostate{},
                    std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                    static_cast<long long>(b), prof.omega_lo * out, prof.omega_hi * out,
                    prof.im_K_max * out, prof.omega_ext * out, prof.im_K_max * out,
                    prof.curvature});
        }
    } catch (const NumericalError& e) {
        em.row({std::string("error"), std::string(e.what())});
        failed = true;
    }
    return failed ? 3 : 0;
}

int cmd_isofreq(const Common& c) {
    const Setup s = load_setup(c);
    const double in = c.physical ? s.T : 1.0, out = 1.0 / in;
    if (c.omega_s.empty())
        throw ConfigError("isofreq needs --omega (a single frequency)");
    const Range wr = parse_range(c.omega_s, "--omega");
    if (wr.n != 1)
        throw ConfigError("isofreq runs at a single omega; pass --omega x");
    const double w = wr.a * in;
    const double k_cap_default =
        w * std::sqrt(s.p.extremum(ProfileExpr::RhoOverMu2).second) + 2.0;
    const Range kr = c.k_s.empty() ? Range{0.0, k_cap_default / in, 2}
                                   : parse_range(c.k_s, "--k");
    const double k_max = kr.b * in;
    const Range Kr{0, 0, 1};

    Emitter em(c.format == "jsonl",
               {"kind", "j", "k", "K", "closed", "n_points", "m", "tangent", "omega", "k10",
                "bracket_lo", "bracket_hi", "h", "min_h", "lemma_ok", "bracket_ok", "passed",
                "terms", "error"});
    em.header(base_meta("isofreq", s, c, wr, kr, Kr));

    int rc = 0;
    try {
        for (const auto& br : iso_branches(s.p, w, k_max, s.cfg)) {
            em.row({std::string("branch_summary"), static_cast<long long>(br.j),
                    std::monostate{}, std::monostate{}, br.closed,
                    static_cast<long long>(br.points.size())});
            for (const auto& [kk, K] : br.points)
                em.row({std::string("branch"), static_cast<long long>(br.j), kk * out,
                        K * out});
            for (const auto& e : br.edges)
                em.row({std::string("edge"), static_cast<long long>(br.j), e.k * out,
                        std::monostate{}, std::monostate{}, std::monostate{},
                        static_cast<long long>(e.m), e.tangent});
        }
    } catch (const NumericalError& e) {
        em.row({std::string("error"), std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::string(e.what())});
        rc = 3;
    }

    try {
        const auto cert = convexity_certificate(s.p, w, s.cfg);
        for (std::size_t i = 0; i < cert.k.size(); ++i)
            em.row({std::string("certificate_sample"), std::monostate{}, cert.k[i] * out,
                    std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                    std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                    std::monostate{}, cert.h[i]});
        em.row({std::string("certificate"), std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, cert.omega * out, cert.k10 * out, cert.bracket_lo * out,
                cert.bracket_hi * out, std::monostate{}, cert.min_h, cert.lemma_ok,
                cert.bracket_ok, cert.passed});
    } catch (const OmegaTooHigh&) {
        // no closed first branch at this frequency; nothing to certify
    } catch (const NumericalError& e) {
        em.row({std::string("error"), std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::string(e.what())});
        rc = 3;
    }

    if (c.terms > 0) {
        const auto tr = truncated_series_isofreq(s.p, w, c.terms, s.cfg);
        em.row({std::string("truncated_summary"), static_cast<long long>(tr.j),
                std::monostate{}, std::monostate{}, tr.closed,
                static_cast<long long>(tr.points.size()), std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                std::monostate{}, static_cast<long long>(c.terms)});
        for (const auto& [kk, K] : tr.points)
            em.row({std::string("truncated"), static_cast<long long>(tr.j), kk * out, K * out,
                    std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                    std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                    std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                    std::monostate{}, static_cast<long long>(c.terms)});
    }
    return rc;
}

int cmd_zws_scan(const Common& c) {
    const Setup s = load_setup(c);
    const double in = c.physical ? s.T : 1.0, out = 1.0 / in;
    const Range wr = parse_range(c.omega_s.empty() ? "0:12:2" : c.omega_s, "--omega");
    const Range kr = parse_range(c.k_s.empty() ? "0:5:21" : c.k_s, "--k");
    const Range Kr{0, 0, 1};
    const double w_lo = wr.a * in, w_hi = wr.b * in;
    const auto kg = linspace(kr);

    Emitter em(c.format == "jsonl",
               {"omega", "k", "sign", "residual_M", "residual_m2", "newton_converged",
                "confirmed", "seed_omega", "seed_k", "error"});
    em.header(base_meta("zws-scan", s, c, wr, kr, Kr));

    struct Candidate {
        double seed_w, seed_k;
        ZwsReport rep;
    };
    std::vector<std::vector<Candidate>> per_k(kg.size());
    std::vector<std::vector<Cell>> errs;
    const bool failed = parallel_cells(c.jobs, kg.size(), em.ncols(), errs, [&](std::size_t i) -> std::vector<Cell> {
        const double k = kg[i] * in;
        const auto edges = band_edges(s.p, k, w_hi, s.cfg);
        // candidate seeds: tangency hits and unusually narrow stopbands
        std::vector<double> seeds;
        double avg = 0.0;
        for (std::size_t j = 1; j < edges.size(); ++j)
            avg += edges[j].omega - edges[j - 1].omega;
        if (edges.size() > 1)
            avg /= double(edges.size() - 1);
        for (std::size_t j = 0; j < edges.size(); ++j) {
            if (edges[j].tangent) {
                seeds.push_back(edges[j].omega);
            } else if (j + 1 < edges.size() && edges[j + 1].parity == edges[j].parity &&
                       !edges[j + 1].tangent &&
                       edges[j + 1].omega - edges[j].omega < 0.05 * avg) {
                seeds.push_back(0.5 * (edges[j].omega + edges[j + 1].omega));
                ++j;
            }
        }
        for (double sw : seeds) {
            if (sw < w_lo || sw > w_hi)
                continue;
            try {
                per_k[i].push_back({sw, k, detect_zws(s.p, sw, k, s.cfg, ZwsMode::Free)});
            } catch (const NumericalError&) {
                // divergent refinement from this seed; drop it
            }
        }
        return {};
    });

    std::vector<Candidate> all;
    for (auto& v : per_k)
        all.insert(all.end(), v.begin(), v.end());
    std::vector<Candidate> kept;
    for (const auto& cand : all) {
        bool dup = false;
        for (const auto& prev : kept)
            dup = dup || (std::abs(prev.rep.omega - cand.rep.omega) < 1e-6 * (1.0 + cand.rep.omega) &&
                          std::abs(prev.rep.k - cand.rep.k) < 1e-6 * (1.0 + cand.rep.k));
        if (!dup)
            kept.push_back(cand);
    }
    for (const auto& cand : kept)
        em.row({cand.rep.omega * out, cand.rep.k * out, static_cast<long long>(cand.rep.sign),
                cand.rep.residual_M, cand.rep.residual_m2, cand.rep.newton_converged,
                cand.rep.confirmed, cand.seed_w * out, cand.seed_k * out});
    for (const auto& r : errs)
        if (!r.empty())
            em.row(r);
    return failed ? 3 : 0;
}

int cmd_green(const Common& c) {
    const Setup s = load_setup(c);
    const double in = c.physical ? s.T : 1.0;
    if (c.omega_s.empty())
        throw ConfigError("green needs --omega (a single frequency)");
    const Range wr = parse_range(c.omega_s, "--omega");
    const Range kr = parse_range(c.k_s.empty() ? "0" : c.k_s, "--k");
    const Range Kr = parse_range(c.K_s.empty() ? "1.5707963267948966" : c.K_s, "--K");
    if (wr.n != 1 || kr.n != 1 || Kr.n != 1)
        throw ConfigError("green runs at a single (omega, k, K) point");
    if (c.grid < 2)
        throw ConfigError("--grid must be >= 2");
    const double w = wr.a * in, k = kr.a * in, K = Kr.a * in;
    const cplx w2 = w * w, k2 = k * k;

    // fail fast (exit 2) when the point sits on the spectrum
    green_tensor(s.p, 0.3, 0.7, K, w2, k2, s.cfg);

    Emitter em(c.format == "jsonl",
               {"y", "s", "G_re", "G_im", "G11_re", "G11_im", "G21_re", "G21_im", "G22_re",
                "G22_im", "error"});
    em.header(base_meta("green", s, c, wr, kr, Kr));

    const std::size_t ng = static_cast<std::size_t>(c.grid);
    const double y_scale = c.physical ? s.T : 1.0; // cell coordinate -> position
    std::vector<std::vector<Cell>> rows;
    const bool failed =
        parallel_cells(c.jobs, ng * ng, em.ncols(), rows, [&](std::size_t idx) -> std::vector<Cell> {
            const double y = double(idx / ng) / double(ng - 1);
            const double sc = double(idx % ng) / double(ng - 1);
            const Mat2 G = green_tensor(s.p, y, sc, K, w2, k2, s.cfg);
            const cplx scal = cplx(0.0, 1.0) * G(0, 1); // Hermitian scalar kernel
            return {y * y_scale,
                    sc * y_scale,
                    scal.real(),
                    scal.imag(),
                    G(0, 0).real(),
                    G(0, 0).imag(),
                    G(1, 0).real(),
                    G(1, 0).imag(),
                    G(1, 1).real(),
                    G(1, 1).imag()};
        });
    for (const auto& r : rows)
        em.row(r);
    return failed ? 3 : 0;
}

int cmd_wkb_compare(const Common& c) {
    const Setup s = load_setup(c);
    const double in = c.physical ? s.T : 1.0, out = 1.0 / in;
    const Range wr = parse_range(c.omega_s.empty() ? "10:20:101" : c.omega_s, "--omega");
    const Range kr = parse_range(c.k_s.empty() ? "0" : c.k_s, "--k");
    const Range Kr{0, 0, 1};
    const auto wg = linspace(wr), kg = linspace(kr);

    // profile-level applicability (more than one impedance jump) should be a
    // config error, not a wall of error rows
    try {
        wkb_delta(s.p, std::max(std::abs(wr.b), 1.0) * in * 4.0, 0.0);
    } catch (const MultipleJumps&) {
        throw;
    } catch (const std::exception&) {
        // per-point issues handled in the sweep
    }

    Emitter em(c.format == "jsonl",
               {"omega", "k", "delta_exact", "delta_wkb", "abs_err", "error"});
    em.header(base_meta("wkb-compare", s, c, wr, kr, Kr));

    std::vector<std::vector<Cell>> rows;
    const bool failed = parallel_cells(
        c.jobs, wg.size() * kg.size(), em.ncols(), rows, [&](std::size_t i) -> std::vector<Cell> {
            const double w = wg[i / kg.size()] * in, k = kg[i % kg.size()] * in;
            try {
                const double ex = delta(s.p, w * w, k * k, s.cfg).delta.real();
                const double ap = wkb_delta(s.p, w, k);
                return {w * out, k * out, ex, ap, std::abs(ex - ap)};
            } catch (const NotSupersonic& e) {
                return {w * out, k * out, std::monostate{}, std::monostate{},
                        std::monostate{}, std::string(e.what())};
            }
        });
    for (const auto& r : rows)
        em.row(r);
    return failed ? 3 : 0;
}

int cmd_verify(const Common& c) {
    const Setup s = load_setup(c);
    const Range none{0, 0, 1};
    Emitter em(c.format == "jsonl", {"suite", "name", "residual", "tolerance", "passed"});
    em.header(base_meta("verify", s, c, none, none, none));
    bool all_ok = true;
    for (const auto& r : verify_all(s.p, s.cfg)) {
        em.row({r.suite, r.name, r.residual, r.tolerance, r.passed});
        all_ok = all_ok && r.passed;
    }
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet spectral toolkit for 1D periodic profiles"};
    app.require_subcommand(1);
    Common c;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--profile", c.profile_path, "profile description (json)");
        sub->add_option("--omega", c.omega_s, "frequency value or range a:b:n");
        sub->add_option("--k", c.k_s, "wavenumber value or range a:b:n");
        sub->add_option("--K", c.K_s, "Floquet parameter value or range a:b:n");
        sub->add_option("--tol", c.tol, "propagator tolerance (default 1e-12)");
        sub->add_option("--scheme", c.scheme, "midpoint | magnus4 (default)");
        sub->add_option("--format", c.format, "csv (default) | jsonl")
            ->check(CLI::IsMember({"csv", "jsonl"}));
        sub->add_option("--jobs", c.jobs, "worker threads (0 = all cores, default 1)");
        sub->add_flag("--physical", c.physical, "use physical units (divide by the period)");
        return sub;
    };

    auto* sub_map = add_common(app.add_subcommand(
        "delta-map", "Lyapunov function, band class and Floquet exponent on a grid"));
    auto* sub_band = add_common(app.add_subcommand(
        "band", "dispersion branches omega_n(K) at fixed k, edges and gap profiles"));
    sub_band->add_option("--branches", c.branches, "number of branches (default 4)");
    auto* sub_iso = add_common(app.add_subcommand(
        "isofreq", "isofrequency branches K_j(k) at fixed omega, plus convexity data"));
    sub_iso->add_option("--truncate-terms", c.terms,
                        "add a layer-series branch truncated after N terms");
    auto* sub_zws = add_common(app.add_subcommand(
        "zws-scan", "hunt zero-width stopbands over an (omega, k) window"));
    auto* sub_green = add_common(app.add_subcommand(
        "green", "quasi-periodic Green kernel on a (y, s) grid at one (omega, k, K)"));
    sub_green->add_option("--grid", c.grid, "samples per axis (default 65)");
    auto* sub_wkb = add_common(app.add_subcommand(
        "wkb-compare", "exact Lyapunov function vs short-wave approximation"));
    auto* sub_verify = add_common(
        app.add_subcommand("verify", "run the library invariant suite on a profile"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sub_map->parsed())
            return cmd_delta_map(c);
        if (sub_band->parsed())
            return cmd_band(c);
        if (sub_iso->parsed())
            return cmd_isofreq(c);
        if (sub_zws->parsed())
            return cmd_zws_scan(c);
        if (sub_green->parsed())
            return cmd_green(c);
        if (sub_wkb->parsed())
            return cmd_wkb_compare(c);
        if (sub_verify->parsed())
            return cmd_verify(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
