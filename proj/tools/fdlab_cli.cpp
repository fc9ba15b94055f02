// fdlab command line: every module surfaced as a subcommand with
// machine-readable csv / json-lines / plain output.

#include "CLI11.hpp"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/fracdiff.hpp"
#include "fdlab/model_sim.hpp"
#include "fdlab/operator_cert.hpp"
#include "fdlab/operators.hpp"
#include "fdlab/shifts.hpp"
#include "fdlab/similarity.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace fdlab;

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

struct Cell {
    std::string name;
    std::string value;
    bool is_string;
};

Cell num(const std::string& name, double v) { return {name, fmt(v), false}; }
Cell num(const std::string& name, long v) { return {name, std::to_string(v), false}; }
Cell num(const std::string& name, int v) { return {name, std::to_string(v), false}; }
Cell str(const std::string& name, const std::string& v) { return {name, v, true}; }

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

class Writer {
public:
    Writer(std::ostream& os, std::string format) : os_(os), format_(std::move(format)) {}

    void row(const std::vector<Cell>& cells) {
        if (format_ == "csv") {
            if (!header_done_) {
                for (std::size_t i = 0; i < cells.size(); ++i)
                    os_ << (i ? "," : "") << cells[i].name;
                os_ << "\n";
                header_done_ = true;
            }
            for (std::size_t i = 0; i < cells.size(); ++i)
                os_ << (i ? "," : "") << cells[i].value;
            os_ << "\n";
        } else if (format_ == "jsonl") {
            os_ << "{";
            for (std::size_t i = 0; i < cells.size(); ++i) {
                os_ << (i ? "," : "") << "\"" << cells[i].name << "\":";
                if (cells[i].is_string)
                    os_ << "\"" << json_escape(cells[i].value) << "\"";
                else
                    os_ << cells[i].value;
            }
            os_ << "}\n";
        } else { // plain
            for (std::size_t i = 0; i < cells.size(); ++i)
                os_ << (i ? " " : "") << cells[i].name << "=" << cells[i].value;
            os_ << "\n";
        }
    }

private:
    std::ostream& os_;
    std::string format_;
    bool header_done_ = false;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw PreconditionError("empty numeric list: '" + s + "'");
    return out;
}

fracdiff::RealSequence parse_seq(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw PreconditionError("sequence spec needs kind:payload, got '" + spec + "'");
    std::string kind = spec.substr(0, colon);
    std::string payload = spec.substr(colon + 1);
    if (kind == "geometric") return fracdiff::RealSequence::geometric(std::stod(payload));
    if (kind == "poly") return fracdiff::RealSequence::polynomial(parse_list(payload));
    if (kind == "values") return fracdiff::RealSequence::from_values(parse_list(payload));
    if (kind == "cesaro")
        return shifts::power_norm_sequence({shifts::Direction::forward, std::stod(payload)}, 0);
    if (kind == "file") {
        std::ifstream in(payload);
        if (!in) throw IoError("cannot open sequence file: " + payload);
        std::vector<double> vals;
        double v;
        while (in >> v) vals.push_back(v);
        if (vals.empty()) throw IoError("empty sequence file: " + payload);
        return fracdiff::RealSequence::from_values(std::move(vals));
    }
    throw PreconditionError("unknown sequence kind '" + kind + "'");
}

shifts::ShiftSpec parse_shift(const std::string& dir, double s) {
    if (dir == "backward" || dir == "b") return {shifts::Direction::backward, s};
    if (dir == "forward" || dir == "f") return {shifts::Direction::forward, s};
    throw PreconditionError("direction must be forward or backward");
}

std::vector<Cell> report_cells(const fracdiff::ConvergenceReport& r) {
    return {num("value", r.value),
            str("method", fracdiff::to_string(r.method)),
            num("cesaro_order", r.cesaro_order),
            num("terms_used", r.terms_used),
            num("tail_bound", r.tail_bound),
            str("status", fracdiff::to_string(r.status))};
}

int dispatch(std::vector<std::string> args, std::ostream& out, bool allow_sweep);

int run_sweep(const std::string& file, unsigned jobs, std::ostream& out) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open sweep file: " + file);
    std::vector<std::vector<std::string>> items;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::vector<std::string> toks;
        std::string t;
        while (ss >> t) toks.push_back(t);
        if (!toks.empty() && toks[0][0] != '#') items.push_back(std::move(toks));
    }
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<std::pair<int, std::string>>> futs(items.size());
    std::vector<std::pair<int, std::string>> results(items.size());
    std::size_t next = 0;
    while (next < items.size()) {
        std::size_t batch = std::min<std::size_t>(jobs, items.size() - next);
        for (std::size_t i = 0; i < batch; ++i) {
            auto item = items[next + i];
            futs[next + i] = std::async(std::launch::async, [item]() {
                std::ostringstream os;
                int rc = dispatch(item, os, /*allow_sweep=*/false);
                return std::make_pair(rc, os.str());
            });
        }
        for (std::size_t i = 0; i < batch; ++i) results[next + i] = futs[next + i].get();
        next += batch;
    }
    int rc = 0;
    for (auto& [code, text] : results) { // input order regardless of completion
        out << text;
        rc = std::max(rc, code);
    }
    return rc;
}

int dispatch(std::vector<std::string> args, std::ostream& out, bool allow_sweep) {
    CLI::App app{"fractional-difference and operator-inequality laboratory"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    double tol = 1e-9;
    long budget = 1'000'000;
    std::string format = "csv";
    std::string out_file;
    app.add_option("--tol", tol, "tolerance for series evaluation and certificates");
    app.add_option("--budget", budget, "term budget for series evaluation");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl", "plain"}));
    app.add_option("--out", out_file, "write rows to this file instead of stdout");

    // ---- cesaro
    auto* c_cesaro = app.add_subcommand("cesaro", "Cesaro numbers k^a(n)");
    double ca = 0.5;
    long cn = 0, clen = 0;
    c_cesaro->add_option("--a", ca, "order")->required();
    c_cesaro->add_option("--n", cn, "index");
    c_cesaro->add_option("--len", clen, "emit the whole sequence k^a(0..len-1)");

    // ---- fracdiff
    auto* c_fd = app.add_subcommand("fracdiff", "(1-nabla)^a Lambda_n");
    double fa = 0.5;
    long fn = 0;
    std::string fseq, fmethod;
    double ftau = -1.0;
    c_fd->add_option("--a", fa, "order")->required();
    c_fd->add_option("--seq", fseq, "sequence spec kind:payload")->required();
    c_fd->add_option("--n", fn, "index");
    c_fd->add_option("--method", fmethod, "summability request")
        ->check(CLI::IsMember({"cesaro", "abel"}));
    c_fd->add_option("--tau", ftau, "Cesaro order for --method cesaro");

    // ---- summability
    auto* c_sum = app.add_subcommand("summability", "(C,tau) limit of a sequence");
    double stau = 1.0;
    std::string sseq;
    c_sum->add_option("--tau", stau, "Cesaro order")->required();
    c_sum->add_option("--seq", sseq, "sequence spec kind:payload")->required();

    // ---- shift-classify
    auto* c_cls = app.add_subcommand("shift-classify", "sign class of a weighted shift");
    std::string cdir;
    double cs = 1.0, cla = 1.0;
    c_cls->add_option("--dir", cdir, "forward|backward")->required();
    c_cls->add_option("--s", cs, "weight")->required();
    c_cls->add_option("--a", cla, "order")->required();

    // ---- certify
    auto* c_cert = app.add_subcommand("certify", "a-contraction certificate");
    std::string cert_matrix, cert_dir;
    double cert_a = 0.5, cert_s = 0.0;
    int cert_dim = 0;
    c_cert->add_option("--matrix", cert_matrix, "matrix file");
    c_cert->add_option("--dir", cert_dir, "shift direction (with --s/--dim)");
    c_cert->add_option("--s", cert_s, "shift weight");
    c_cert->add_option("--dim", cert_dim, "truncation dimension");
    c_cert->add_option("--a", cert_a, "order")->required();

    // ---- isometry
    auto* c_iso = app.add_subcommand("isometry", "a-isometry check on power norms");
    std::string iso_matrix, iso_dir;
    double iso_a = 1.0, iso_s = 0.0;
    int iso_dim = 0;
    long iso_horizon = 40;
    unsigned iso_seed = 0;
    c_iso->add_option("--matrix", iso_matrix, "matrix file");
    c_iso->add_option("--dir", iso_dir, "shift direction (with --s)");
    c_iso->add_option("--s", iso_s, "shift weight");
    c_iso->add_option("--dim", iso_dim, "truncation dimension (matrix probes)");
    c_iso->add_option("--a", iso_a, "order")->required();
    c_iso->add_option("--horizon", iso_horizon, "sequence horizon");
    c_iso->add_option("--seed", iso_seed, "seed for the random probe vectors")->required();

    // ---- model
    auto* c_model = app.add_subcommand("model", "defect-operator model realization");
    std::string m_dir;
    double m_s = 0.5, m_a = 0.5;
    int m_dim = 5;
    long m_depth = 0;
    c_model->add_option("--shift", m_dir, "forward|backward")->required();
    c_model->add_option("--s", m_s, "weight")->required();
    c_model->add_option("--dim", m_dim, "truncation dimension")->required();
    c_model->add_option("--a", m_a, "model order, in (0,1)")->required();
    c_model->add_option("--depth", m_depth, "truncation depth (0 = certified automatic)");

    // ---- gap
    auto* c_gap = app.add_subcommand("gap", "growth obstruction for a > 1 models");
    double g_a = 2.0, g_s = 2.5;
    long g_nmax = 1L << 14;
    c_gap->add_option("--a", g_a, "order")->required();
    c_gap->add_option("--s", g_s, "shift weight")->required();
    c_gap->add_option("--nmax", g_nmax, "largest dyadic power");

    // ---- similarity
    auto* c_sim = app.add_subcommand("similarity", "similarity-to-a-contraction pipeline");
    std::string sim_matrix, sim_dir, sim_gt, sim_g, sim_prefix;
    double sim_alpha = 1.0, sim_s = 0.0;
    int sim_dim = 0;
    c_sim->add_option("--matrix", sim_matrix, "matrix file for T_hat");
    c_sim->add_option("--shift", sim_dir, "shift direction (with --s/--dim)");
    c_sim->add_option("--s", sim_s, "shift weight");
    c_sim->add_option("--dim", sim_dim, "truncation dimension");
    c_sim->add_option("--alpha", sim_alpha, "alpha = (1-t)^a exponent")->required();
    c_sim->add_option("--gamma-tilde", sim_gt, "comma list of gamma-tilde coefficients")
        ->required();
    c_sim->add_option("--g", sim_g, "comma list of positivizer coefficients (optional)");
    c_sim->add_option("--mat-out", sim_prefix, "prefix for writing B/T matrix files");

    // ---- sweep
    auto* c_sweep = app.add_subcommand("sweep", "run many subcommand lines, ordered output");
    std::string sweep_file;
    unsigned sweep_jobs = 0;
    c_sweep->add_option("--file", sweep_file, "file with one subcommand line per row")
        ->required();
    c_sweep->add_option("--jobs", sweep_jobs, "worker count (0 = hardware)");

    std::reverse(args.begin(), args.end()); // CLI11 vector parse order
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        std::ostringstream dummy;
        int rc = app.exit(e, dummy, dummy);
        out << dummy.str();
        return rc == 0 ? 0 : 64;
    }

    std::ofstream out_stream;
    std::ostream* sink = &out;
    if (!out_file.empty()) {
        out_stream.open(out_file);
        if (!out_stream) throw IoError("cannot open output file: " + out_file);
        sink = &out_stream;
    }
    Writer w(*sink, format);

    if (*c_cesaro) {
        if (clen > 0) {
            for (long n = 0; n < clen; ++n)
                w.row({num("a", ca), num("n", n), num("value", cesaro::number(ca, n))});
        } else {
            w.row({num("a", ca), num("n", cn), num("value", cesaro::number(ca, cn))});
        }
        return 0;
    }
    if (*c_fd) {
        fracdiff::EvalOptions o;
        o.tol = tol;
        o.budget = budget;
        if (fmethod == "cesaro")
            o.cesaro_order = ftau >= 0 ? ftau : std::ceil(fa) + 1.0;
        if (fmethod == "abel") o.allow_abel = true;
        auto rep = fracdiff::frac_diff(fa, parse_seq(fseq), fn, o);
        std::vector<Cell> cells = {num("a", fa), num("n", fn)};
        for (auto& c : report_cells(rep)) cells.push_back(c);
        w.row(cells);
        return 0;
    }
    if (*c_sum) {
        fracdiff::EvalOptions o;
        o.tol = tol;
        o.budget = budget;
        auto rep = fracdiff::summable_limit(stau, parse_seq(sseq), o);
        std::vector<Cell> cells = {num("tau", stau)};
        for (auto& c : report_cells(rep)) cells.push_back(c);
        w.row(cells);
        return 0;
    }
    if (*c_cls) {
        auto cls = shifts::classify(parse_shift(cdir, cs), cla);
        w.row({str("dir", cdir), num("s", cs), num("a", cla),
               str("verdict", shifts::to_string(cls.verdict)), str("detail", cls.detail)});
        return 0;
    }
    if (*c_cert) {
        std::optional<operators::FiniteOperator> T;
        if (!cert_matrix.empty())
            T = operators::read_matrix_file(cert_matrix);
        else if (!cert_dir.empty() && cert_dim > 0)
            T = shifts::truncate(parse_shift(cert_dir, cert_s), cert_dim);
        else
            throw PreconditionError("certify: give --matrix or --dir/--s/--dim");
        auto rep = operator_cert::certify_a_contraction(*T, cert_a, tol);
        w.row({num("a", cert_a), num("dim", T->dim()), num("min_eigenvalue", rep.min_eigenvalue),
               num("truncation_terms", rep.truncation_terms),
               num("truncation_bound", rep.truncation_bound),
               str("verdict", operator_cert::to_string(rep.verdict)), str("note", rep.note)});
        return rep.verdict == operator_cert::CertVerdict::inconclusive ? 2 : 0;
    }
    if (*c_iso) {
        std::optional<operator_cert::OperatorOrShift> T;
        if (!iso_matrix.empty())
            T = operators::read_matrix_file(iso_matrix);
        else if (!iso_dir.empty() && iso_dim > 0)
            T = shifts::truncate(parse_shift(iso_dir, iso_s), iso_dim);
        else if (!iso_dir.empty())
            T = parse_shift(iso_dir, iso_s);
        else
            throw PreconditionError("isometry: give --matrix or --dir/--s");
        auto rep = operator_cert::certify_a_isometry(*T, iso_a, iso_horizon, tol, iso_seed);
        w.row({num("a", iso_a), num("degree", rep.poly_degree),
               num("is_isometry", rep.is_isometry ? 1 : 0),
               num("max_fit_residual", rep.max_fit_residual),
               num("max_diff_residual", rep.max_diff_residual)});
        return 0;
    }
    if (*c_model) {
        auto T = shifts::truncate(parse_shift(m_dir, m_s), m_dim);
        auto rep = model_sim::build_model(T, m_a, m_depth, tol);
        w.row({str("shift", m_dir), num("s", m_s), num("dim", m_dim), num("a", m_a),
               num("defect_rank", rep.defect_rank), num("quotient_dim", rep.quotient_dim),
               num("isometry_defect", rep.isometry_defect),
               num("intertwining_residual", rep.intertwining_residual),
               num("norm_identity_residual", rep.norm_identity_residual), num("depth", rep.depth),
               num("tail_bound", rep.tail_bound)});
        return 0;
    }
    if (*c_gap) {
        auto rep = model_sim::counterexample_gap(g_a, g_s, g_nmax);
        w.row({num("a", g_a), num("s", g_s), num("nmax", g_nmax),
               num("growth_exponent", rep.shift_growth_exponent),
               num("model_cap", rep.model_growth_cap), num("separated", rep.separated ? 1 : 0),
               num("nonneg", rep.shift_is_a_contraction ? 1 : 0)});
        return 0;
    }
    if (*c_sim) {
        std::optional<operators::FiniteOperator> T;
        if (!sim_matrix.empty())
            T = operators::read_matrix_file(sim_matrix);
        else if (!sim_dir.empty() && sim_dim > 0)
            T = shifts::truncate(parse_shift(sim_dir, sim_s), sim_dim);
        else
            throw PreconditionError("similarity: give --matrix or --shift/--s/--dim");
        series::CoefficientSeries alpha = cesaro::sequence({-sim_alpha, 64});
        if (std::fabs(sim_alpha - std::nearbyint(sim_alpha)) < 1e-12)
            alpha = series::CoefficientSeries(
                cesaro::coefficients(-sim_alpha,
                                     static_cast<std::size_t>(std::llround(sim_alpha)) + 1));
        series::CoefficientSeries gt(parse_list(sim_gt));
        std::optional<series::CoefficientSeries> g;
        if (!sim_g.empty()) g = series::CoefficientSeries(parse_list(sim_g));
        auto outcome = similarity::verify_similarity(*T, alpha, gt, g, tol);
        if (std::holds_alternative<similarity::Refusal>(outcome)) {
            auto& ref = std::get<similarity::Refusal>(outcome);
            w.row({str("status", "refused"), str("stage", ref.stage), str("detail", ref.detail)});
            return 2;
        }
        auto& cert = std::get<similarity::SimilarityCertificate>(outcome);
        std::string b_ref = "-", t_ref = "-";
        if (!sim_prefix.empty()) {
            b_ref = sim_prefix + ".B.mat";
            t_ref = sim_prefix + ".T.mat";
            operators::write_matrix_file(b_ref, cert.B);
            operators::write_matrix_file(t_ref, cert.T);
        }
        std::ostringstream gs, hs;
        for (std::size_t i = 0; i < cert.g.size(); ++i) gs << (i ? "," : "") << fmt(cert.g.coeffs()[i]);
        for (std::size_t i = 0; i < cert.h.size(); ++i) hs << (i ? "," : "") << fmt(cert.h.coeffs()[i]);
        w.row({str("status", "ok"), str("stage", "-"), str("detail", "-"),
               num("epsilon", cert.epsilon), num("alpha_min_eig", cert.alpha_min_eig),
               num("compose_residual", cert.compose_residual),
               num("reconstruction_residual", cert.reconstruction_residual),
               num("tail_certified", cert.tail_certified ? 1 : 0), str("g", gs.str()),
               str("h", hs.str()), str("B", b_ref), str("T", t_ref)});
        return 0;
    }
    if (*c_sweep) {
        if (!allow_sweep) throw PreconditionError("sweep cannot nest");
        return run_sweep(sweep_file, sweep_jobs, *sink);
    }
    return 64;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(std::move(args), std::cout, /*allow_sweep=*/true);
    } catch (const fdlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
