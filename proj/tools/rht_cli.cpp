// rht: command-line front end for the rounded Hartley transform library.
//
// Exit codes: 0 ok, 2 usage, 3 parse/IO, 4 failed check.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rht/rht.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kParse = 3;
constexpr int kCheckFailed = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string g12(double v) { return rht::format_g12(v); }

// Output sink: stdout or a file.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw rht::IoError("cannot write " + path);
        }
    }
    std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::vector<double> fig2_signal(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n);
        v[i] = std::cos(90.0 * std::numbers::pi * x) * (x - 0.5) * (x - 0.5);
    }
    return v;
}

// Whitespace- or comma-separated numbers; '#' starts a comment.
std::vector<double> read_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rht::IoError("cannot open " + path);
    std::vector<double> v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || !std::isfinite(x))
                throw rht::ParseError("line " + std::to_string(lineno), "bad sample '" + tok + "'");
            v.push_back(x);
        }
    }
    if (v.empty()) throw rht::ParseError("signal", "no samples");
    return v;
}

// ---------------------------------------------------------------------------

struct GenMatrixOpts {
    std::size_t n = 0;
    bool scaled = false, dht = false, pretty = false;
    std::string out;
};

int cmd_gen_matrix(const GenMatrixOpts& o) {
    if (o.n < 1) throw UsageError("--n must be >= 1");
    Sink sink(o.out);
    auto& os = sink.out();
    const auto norm = o.scaled ? rht::Normalization::Symmetric : rht::Normalization::Unscaled;
    if (o.dht || o.scaled) {
        const rht::RealMatrix m = o.dht ? rht::build_dht_matrix(o.n, norm) : rht::build_rht_matrix(o.n).to_real(norm);
        for (std::size_t i = 0; i < o.n; ++i) {
            for (std::size_t k = 0; k < o.n; ++k) os << (k ? " " : "") << g12(m(i, k) == 0.0 ? 0.0 : m(i, k));
            os << '\n';
        }
        return kOk;
    }
    const rht::TernaryMatrix h = rht::build_rht_matrix(o.n);
    for (std::size_t i = 0; i < o.n; ++i) {
        for (std::size_t k = 0; k < o.n; ++k) {
            const int e = h(i, k);
            if (o.pretty)
                os << (k ? " " : "") << (e == 1 ? '1' : e == -1 ? '-' : ' ');
            else
                os << (k ? " " : "") << e;
        }
        os << '\n';
    }
    return kOk;
}

struct SpectrumOpts {
    std::size_t n = 0;
    std::string signal;
    bool dht = false;
    std::string out;
};

int cmd_spectrum(const SpectrumOpts& o) {
    std::vector<double> v;
    if (o.signal == "builtin:fig2") {
        v = fig2_signal(o.n == 0 ? 64 : o.n);
    } else if (o.signal.rfind("builtin:", 0) == 0) {
        throw UsageError("unknown builtin signal '" + o.signal + "'");
    } else {
        v = read_signal(o.signal);
    }
    if (o.n != 0 && v.size() != o.n) throw rht::DimensionError("signal length", o.n, v.size());
    const std::size_t n = v.size();
    const rht::SignalVector sv(v);
    const rht::Spectrum r = rht::apply_direct(rht::make_transform(n, rht::Normalization::Unscaled), sv);
    std::optional<rht::Spectrum> d;
    if (o.dht) d = rht::apply_dht(rht::build_dht_matrix(n), sv);
    Sink sink(o.out);
    auto& os = sink.out();
    os << (o.dht ? "k,V_k,V_k_dht\n" : "k,V_k\n");
    for (std::size_t k = 0; k < n; ++k) {
        os << k << ',' << g12(r[k]);
        if (d) os << ',' << g12((*d)[k]);
        os << '\n';
    }
    return kOk;
}

struct CurveOpts {
    std::size_t from = 2, to = 0, stride = 1;
    bool slow = false;
    std::string out, in;
};

std::size_t default_to(const CurveOpts& o) { return o.to != 0 ? o.to : (o.slow ? 1024 : 256); }

rht::NormCurve compute_curve(const CurveOpts& o) {
    const std::size_t to = default_to(o);
    if (o.from < 2 || to < o.from) throw UsageError("need 2 <= --from <= --to");
    if (o.stride < 1) throw UsageError("--stride must be >= 1");
    return rht::norm_curve(o.from, to, o.stride, [&](std::size_t n) {
        if (n % 64 == 0 || n == to) std::cerr << "norm-curve: n=" << n << "/" << to << "\n";
    });
}

int cmd_norm_curve(const CurveOpts& o) {
    const rht::NormCurve c = compute_curve(o);
    Sink sink(o.out);
    sink.out() << rht::format_csv(c);
    return kOk;
}

int cmd_fit(const CurveOpts& o) {
    const rht::NormCurve c = o.in.empty() ? compute_curve(o) : rht::read_csv(o.in);
    const rht::FreundlichFit f = rht::freundlich_fit(c);
    std::cout << "a=" << g12(f.a) << "\n"
              << "b=" << g12(f.b) << "\n"
              << "residual=" << g12(f.residual) << "\n"
              << "points_used=" << f.points_used << "\n"
              << "excluded=";
    for (std::size_t i = 0; i < f.excluded.size(); ++i) std::cout << (i ? " " : "") << f.excluded[i];
    std::cout << "\n";
    return kOk;
}

struct QuasiOpts {
    std::size_t k = 2;
    std::string eps = "2/9";
    std::size_t from = 2, to = 256;
};

int cmd_quasi_period(const QuasiOpts& o) {
    if (o.k < 1) throw UsageError("--k must be >= 1");
    if (o.from < 1 || o.to < o.from) throw UsageError("need 1 <= --from <= --to");
    mpq_class eps;
    try {
        eps = rht::parse_rational(o.eps);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--eps: ") + e.what());
    }
    if (sgn(eps) <= 0) throw UsageError("--eps must be > 0");
    std::vector<std::size_t> orders;
    for (std::size_t n = o.from; n <= o.to; ++n) orders.push_back(n);
    const rht::QuasiReport r = rht::quasi_period_check(orders, o.k, eps);
    std::cout << "n,mu,pass\n";
    for (const auto& e : r.entries) std::cout << e.n << ',' << g12(e.mu) << ',' << (e.pass ? 1 : 0) << '\n';
    std::cout << "k=" << o.k << "\neps=" << eps.get_str() << "\nmax_mu=" << g12(r.max_mu)
              << "\nall_pass=" << (r.all_pass ? "true" : "false") << "\n";
    return r.all_pass ? kOk : kCheckFailed;
}

int cmd_hadamard(std::size_t n) {
    if (!rht::is_power_of_two(n)) throw UsageError("--n must be a power of two");
    if (n > 64) throw UsageError("--n must be <= 64");
    const auto m = rht::find_hadamard_permutation(n);
    std::cout << "n=" << n << "\n";
    if (!m) {
        std::cout << "result=NoMatch\n"
                  << "note=no column permutation maps the rounded Hartley matrix onto a Walsh-Hadamard matrix"
                  << " (Paley, Sylvester or sequency order)\n";
        return kCheckFailed;
    }
    const auto& p = m->permutation;
    std::cout << "ordering=" << rht::to_string(m->ordering) << "\n"
              << "permutation=" << p.cycles_one_indexed() << "\n"
              << "moved=" << p.moved() << "\n";
    std::vector<std::size_t> moved;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p(k) != k) moved.push_back(k + 1);
    if (moved.size() == 2 && p(moved[0] - 1) == moved[1] - 1)
        std::cout << "columns " << moved[0] << " and " << moved[1] << " transposed (1-indexed)\n";
    else if (moved.empty())
        std::cout << "identity (no columns moved)\n";
    return kOk;
}

struct PatternOpts {
    std::size_t n = 0;
    bool squared = false, omit_diagonal = false;
    std::string out;
};

int cmd_pattern(const PatternOpts& o) {
    if (o.n < 1) throw UsageError("--n must be >= 1");
    const rht::TernaryMatrix h = rht::build_rht_matrix(o.n);
    rht::GrayImage img;
    if (o.squared) {
        const rht::IntegerMatrix sq = rht::square(h);
        rht::RealMatrix m(o.n);
        for (std::size_t i = 0; i < o.n; ++i)
            for (std::size_t j = 0; j < o.n; ++j) m(i, j) = static_cast<double>(sq(i, j));
        img = rht::intensity_diagram(m, rht::DiagramMode::Magnitude, o.omit_diagonal);
    } else {
        img = rht::intensity_diagram(h.to_real(rht::Normalization::Unscaled), rht::DiagramMode::Value, o.omit_diagonal);
    }
    rht::save_pgm(img, o.out, true);
    std::cout << "n=" << o.n << "\nmode=" << (o.squared ? "magnitude" : "value") << "\nout=" << o.out << "\n";
    return kOk;
}

struct Image2dOpts {
    std::string in, out, coeffs;
};

std::string psnr_text(double p) {
    if (std::isinf(p)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", p);
    return buf;
}

int cmd_image2d(const Image2dOpts& o) {
    const rht::Raster raster = rht::read_raster(o.in);
    if (raster.width != raster.height)
        throw rht::ParseError("height", "image is " + std::to_string(raster.width) + "x" +
                                            std::to_string(raster.height) + "; a square image is required");
    const rht::GrayImage a = rht::to_gray_image(raster);
    const rht::RoundTrip r = rht::roundtrip_report(a);
    if (!o.out.empty()) rht::save_pgm(r.recovered, o.out, true);
    if (!o.coeffs.empty()) rht::save_pgm(r.coefficients, o.coeffs, false);
    std::cout << "n=" << a.order() << "\nPSNR_dB=" << psnr_text(r.psnr_db) << "\n";
    if (r.exact()) std::cout << "exact=true\n";
    return kOk;
}

struct BenchOpts {
    std::size_t n = 0, trials = 100;
    std::uint64_t seed = 1;
    bool timing = false;
};

int cmd_fast_bench(const BenchOpts& o) {
    if (!rht::is_power_of_two(o.n)) throw UsageError("--n must be a power of two");
    if (o.trials < 1) throw UsageError("--trials must be >= 1");
    const rht::FastPlan plan = rht::make_plan(o.n);
    const rht::TernaryMatrix h = rht::build_rht_matrix(o.n);
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<std::int64_t> dist(-1'000'000, 1'000'000);
    bool exact = true;
    rht::OpCount measured;
    for (std::size_t t = 0; t < o.trials; ++t) {
        std::vector<std::int64_t> v(o.n);
        for (auto& x : v) x = dist(rng);
        if (rht::fast_rht<std::int64_t>(plan, v) != rht::apply_ternary<std::int64_t>(h, v)) exact = false;
        if (t == 0) {
            std::vector<rht::Counted<std::int64_t>> cv(v.begin(), v.end());
            rht::Counted<std::int64_t>::reset();
            rht::fast_rht<rht::Counted<std::int64_t>>(plan, cv);
            measured = rht::Counted<std::int64_t>::tally();
        }
    }
    std::size_t direct = 0;
    for (std::size_t i = 0; i < o.n; ++i) {
        std::size_t nnz = 0;
        for (std::size_t k = 0; k < o.n; ++k) nnz += h(i, k) != 0;
        direct += nnz - 1;
    }
    const rht::OpCount model = rht::count_model(o.n);
    std::cout << "n=" << o.n << "\nadditions=" << measured.additions << "\nmultiplications=" << measured.multiplications
              << "\nmodel_additions=" << model.additions << "\ndirect_additions=" << direct << "\ntrials=" << o.trials
              << "\noracle=" << (exact ? "EXACT" : "MISMATCH") << "\n";
    if (o.timing) {
        std::vector<double> in(o.n, 1.0), out(o.n), scratch(plan.scratch_size());
        const int reps = 2000;
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r) {
            in[r % o.n] += 1.0;
            rht::fast_rht_uncounted<double>(plan, in, out, scratch);
        }
        const auto t1 = std::chrono::steady_clock::now();
        std::cout << "ns_per_transform=" << std::chrono::duration<double, std::nano>(t1 - t0).count() / reps << "\n";
    }
    const bool ok = exact && measured.multiplications == 0 && measured.additions == model.additions;
    return ok ? kOk : kCheckFailed;
}

int cmd_table1(const std::string& dir_opt) {
    std::string dir = dir_opt;
    if (dir.empty()) {
        const char* env = std::getenv("RHT_IMAGE_DIR");
        if (!env || !*env) throw UsageError("set RHT_IMAGE_DIR or pass --dir");
        dir = env;
    }
    struct Row {
        const char* stem;
        const char* name;
    };
    const Row rows[] = {{"5.1.09", "Moon surface"}, {"5.1.11", "Airplane"}, {"5.2.09", "Aerial"},
                        {"7.1.08", "APC"},          {"7.1.09", "Tank"}};
    std::cout << "image,file,n,PSNR_dB\n";
    std::size_t found = 0;
    for (const Row& r : rows) {
        std::string path;
        for (const char* ext : {".pgm", ".bmp", ".tiff.pgm"}) {
            const auto p = std::filesystem::path(dir) / (std::string(r.stem) + ext);
            if (std::filesystem::exists(p)) {
                path = p.string();
                break;
            }
        }
        if (path.empty()) {
            std::cerr << "table1: " << r.stem << " not found in " << dir << "\n";
            continue;
        }
        ++found;
        const rht::GrayImage a = rht::load_gray(path);
        const double p = rht::roundtrip_report(a).psnr_db;
        std::cout << r.name << ',' << std::filesystem::path(path).filename().string() << ',' << a.order() << ','
                  << psnr_text(p) << "\n";
    }
    return found ? kOk : kParse;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rounded Hartley transform toolkit"};
    app.require_subcommand(1);

    GenMatrixOpts gm;
    auto* gen = app.add_subcommand("gen-matrix", "Print the rounded Hartley (or exact Hartley) matrix");
    gen->add_option("--n", gm.n, "Order")->required();
    gen->add_flag("--scaled", gm.scaled, "Apply 1/sqrt(n)");
    gen->add_flag("--dht", gm.dht, "Exact Hartley matrix instead of the rounded one");
    gen->add_flag("--pretty", gm.pretty, "Show -1 as '-' and 0 as blank");
    gen->add_option("--out", gm.out, "Output file (default stdout)");

    SpectrumOpts sp;
    auto* spec = app.add_subcommand("spectrum", "Unscaled transform of a signal as CSV");
    spec->add_option("--n", sp.n, "Expected signal length (builtin:fig2 defaults to 64)");
    spec->add_option("--signal", sp.signal, "Sample file or builtin:fig2")->required();
    spec->add_flag("--dht", sp.dht, "Add the exact Hartley spectrum column");
    spec->add_option("--out", sp.out, "Output CSV (default stdout)");

    CurveOpts nc;
    auto* curve = app.add_subcommand("norm-curve", "mu(H_s^2 - I) for a range of orders, as CSV");
    curve->add_option("--from", nc.from, "First order (>= 2)");
    curve->add_option("--to", nc.to, "Last order (default 256, or 1024 with --slow)");
    curve->add_option("--stride", nc.stride, "Order step");
    curve->add_flag("--slow", nc.slow, "Default to the full 2..1024 range");
    curve->add_option("--out", nc.out, "Output CSV (default stdout)");

    CurveOpts fc;
    auto* fit = app.add_subcommand("fit", "Least-squares fit mu = a n^b in log-log scale");
    fit->add_option("--in", fc.in, "CSV written by norm-curve; otherwise the curve is computed");
    fit->add_option("--from", fc.from, "First order");
    fit->add_option("--to", fc.to, "Last order (default 256, or 1024 with --slow)");
    fit->add_option("--stride", fc.stride, "Order step");
    fit->add_flag("--slow", fc.slow, "Default to the full 2..1024 range");

    QuasiOpts qo;
    auto* quasi = app.add_subcommand("quasi-period", "Check mu(H_s^k - I) <= eps for each order");
    quasi->add_option("--k", qo.k, "Power");
    quasi->add_option("--eps", qo.eps, "Level as a rational (p/q or decimal)");
    quasi->add_option("--from", qo.from, "First order");
    quasi->add_option("--to", qo.to, "Last order");

    std::size_t had_n = 0;
    auto* had = app.add_subcommand("hadamard", "Column permutation onto a Walsh-Hadamard matrix");
    had->add_option("--n", had_n, "Order (power of two, <= 64)")->required();

    PatternOpts po;
    auto* pat = app.add_subcommand("pattern", "Intensity diagram of H (or H^2) as PGM");
    pat->add_option("--n", po.n, "Order")->required();
    pat->add_flag("--squared", po.squared, "Diagram of H^2 by magnitude");
    pat->add_flag("--omit-diagonal", po.omit_diagonal, "Render the main diagonal white");
    pat->add_option("--out", po.out, "Output PGM")->required();

    Image2dOpts io;
    auto* img = app.add_subcommand("image2d", "2-D transform round trip of a square grayscale image");
    img->add_option("--in", io.in, "PGM or 8-bit BMP")->required();
    img->add_option("--out", io.out, "Recovered image (PGM, quantized)");
    img->add_option("--coeffs", io.coeffs, "Coefficients (PGM, rescaled for viewing)");

    BenchOpts bo;
    auto* bench = app.add_subcommand("fast-bench", "Fast algorithm operation counts and oracle check");
    bench->add_option("--n", bo.n, "Order (power of two)")->required();
    bench->add_option("--trials", bo.trials, "Random integer vectors checked");
    bench->add_option("--seed", bo.seed, "RNG seed");
    bench->add_flag("--timing", bo.timing, "Also print wall-clock time per transform");

    std::string t1_dir;
    auto* t1 = app.add_subcommand("table1", "Round-trip PSNR of the standard test images");
    t1->add_option("--dir", t1_dir, "Image directory (default $RHT_IMAGE_DIR)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*gen) return cmd_gen_matrix(gm);
        if (*spec) return cmd_spectrum(sp);
        if (*curve) return cmd_norm_curve(nc);
        if (*fit) return cmd_fit(fc);
        if (*quasi) return cmd_quasi_period(qo);
        if (*had) return cmd_hadamard(had_n);
        if (*pat) return cmd_pattern(po);
        if (*img) return cmd_image2d(io);
        if (*bench) return cmd_fast_bench(bo);
        if (*t1) return cmd_table1(t1_dir);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const rht::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const rht::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kParse;
    } catch (const rht::InsufficientData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
