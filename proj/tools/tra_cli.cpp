// Command-line front end for the tra library.
//
// Exit codes: 0 ok, 1 regression mismatch, 2 usage or invalid input,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tra/angular.hpp"
#include "tra/error.hpp"
#include "tra/hmd_spectrum.hpp"
#include "tra/model.hpp"
#include "tra/oracle.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Emits the same rows as CSV, JSON (array of objects) or aligned text.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<json> row) { rows_.push_back(std::move(row)); }

    std::string render(const std::string& format) const {
        std::ostringstream os;
        if (format == "json") {
            json arr = json::array();
            for (const auto& row : rows_) {
                json obj = json::object();
                for (std::size_t i = 0; i < columns_.size(); ++i) {
                    obj[columns_[i]] = row[i];
                }
                arr.push_back(obj);
            }
            os << arr.dump(2) << "\n";
            return os.str();
        }
        std::vector<std::vector<std::string>> cells;
        for (const auto& row : rows_) {
            std::vector<std::string> c;
            for (const auto& v : row) {
                c.push_back(cell(v));
            }
            cells.push_back(std::move(c));
        }
        if (format == "csv") {
            os << join(columns_, ",") << "\n";
            for (const auto& c : cells) {
                os << join(c, ",") << "\n";
            }
            return os.str();
        }
        std::vector<std::size_t> width(columns_.size());
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            width[i] = columns_[i].size();
            for (const auto& c : cells) {
                width[i] = std::max(width[i], c[i].size());
            }
        }
        auto line = [&](const std::vector<std::string>& c) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                os << (i ? "  " : "") << std::string(width[i] - c[i].size(), ' ') << c[i];
            }
            os << "\n";
        };
        line(columns_);
        for (const auto& c : cells) {
            line(c);
        }
        return os.str();
    }

private:
    static std::string cell(const json& v) {
        if (v.is_number_float()) {
            return fmt(v.get<double>());
        }
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_boolean()) {
            return v.get<bool>() ? "true" : "false";
        }
        return v.dump();
    }

    static std::string join(const std::vector<std::string>& v, const char* sep) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out += (i ? sep : "") + v[i];
        }
        return out;
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<json>> rows_;
};

// JSON numbers are written with 12 significant digits so every format agrees.
json num(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return json::parse(fmt(v));
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UsageError("cannot write " + path);
    }
    out << text;
}

// ---------------------------------------------------------------- config

struct RunConfig {
    tra::model::MoleculeSpec molecule;
    tra::model::ScreeningChoice screening;
    tra::model::SolverConfig solver;
    std::string format = "csv";
    std::string path;
    std::string units = "both";
};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw UsageError(where + " must be an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw UsageError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
    if (obj.contains(key)) {
        try {
            dst = obj.at(key).get<T>();
        } catch (const json::exception&) {
            throw UsageError(std::string("bad value for '") + key + "'");
        }
    }
}

void check_choice(const std::string& value, const std::set<std::string>& allowed, const std::string& what) {
    if (!allowed.count(value)) {
        throw UsageError("invalid " + what + " '" + value + "'");
    }
}

void read_solver(const json& s, tra::model::SolverConfig& solver) {
    reject_unknown(s,
                   {"N", "nu_window", "nu_step", "rel_tol", "abs_tol", "shallow_cutoff", "min_samples", "convention",
                    "allow_zero_quadrupole", "zero_quadrupole_ell_max", "zero_quadrupole_per_channel",
                    "max_per_channel", "max_ell", "angular_size", "angular_tol"},
                   "solver");
    read(s, "N", solver.N);
    if (s.contains("nu_window")) {
        std::vector<double> w;
        read(s, "nu_window", w);
        if (w.size() != 2) {
            throw UsageError("nu_window must be [upper, lower]");
        }
        solver.nu_window = tra::hmd::NuWindow{w[0], w[1]};
    }
    read(s, "nu_step", solver.plateau.step);
    read(s, "rel_tol", solver.plateau.rel_tol);
    read(s, "abs_tol", solver.plateau.abs_tol);
    read(s, "shallow_cutoff", solver.plateau.shallow_cutoff);
    read(s, "min_samples", solver.plateau.min_samples);
    if (s.contains("convention")) {
        std::string c;
        read(s, "convention", c);
        try {
            solver.convention = tra::model::parse_convention(c);
        } catch (const tra::InvalidArgument& e) {
            throw UsageError(e.what());
        }
    }
    read(s, "allow_zero_quadrupole", solver.allow_zero_quadrupole);
    read(s, "zero_quadrupole_ell_max", solver.zero_quadrupole_ell_max);
    read(s, "zero_quadrupole_per_channel", solver.zero_quadrupole_per_channel);
    read(s, "max_per_channel", solver.max_per_channel);
    read(s, "max_ell", solver.max_ell);
    read(s, "angular_size", solver.angular_size);
    read(s, "angular_tol", solver.angular_tol);
    if (solver.N < 0 || !(solver.plateau.step > 0) || !(solver.plateau.rel_tol > 0) ||
        !(solver.plateau.abs_tol > 0) || solver.plateau.min_samples < 1 || solver.angular_size < 2 ||
        !(solver.angular_tol > 0) || solver.max_per_channel < 1 || solver.max_ell < 0) {
        throw UsageError("solver settings out of range");
    }
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

RunConfig parse_run_config(const json& doc, const std::set<std::string>& extra_top = {}) {
    std::set<std::string> top{"molecule", "screening", "solver", "output"};
    top.insert(extra_top.begin(), extra_top.end());
    reject_unknown(doc, top, "config");
    RunConfig cfg;
    if (!doc.contains("molecule")) {
        throw UsageError("config needs a 'molecule' section");
    }
    const json& m = doc.at("molecule");
    reject_unknown(m, {"Z", "dipole", "quadrupole"}, "molecule");
    read(m, "Z", cfg.molecule.Z);
    read(m, "dipole", cfg.molecule.dipole);
    read(m, "quadrupole", cfg.molecule.quadrupole);
    if (doc.contains("screening")) {
        const json& s = doc.at("screening");
        reject_unknown(s, {"Q", "lambda", "eta"}, "screening");
        read(s, "Q", cfg.screening.Q);
        read(s, "lambda", cfg.screening.lambda);
        read(s, "eta", cfg.screening.eta);
    }
    if (doc.contains("solver")) {
        read_solver(doc.at("solver"), cfg.solver);
    }
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        reject_unknown(o, {"format", "path", "units"}, "output");
        read(o, "format", cfg.format);
        read(o, "path", cfg.path);
        read(o, "units", cfg.units);
    }
    check_choice(cfg.format, {"csv", "json", "text"}, "format");
    check_choice(cfg.units, {"table", "hartree", "both"}, "units");
    return cfg;
}

void require_valid(const RunConfig& cfg, bool check_screening = true) {
    if (cfg.molecule.Z < 1) {
        throw UsageError("molecule.Z must be >= 1");
    }
    if (!check_screening) {
        return;
    }
    const auto v = tra::model::validate(cfg.molecule, cfg.screening, cfg.solver.convention);
    if (!v.empty()) {
        std::string msg = "invalid parameters:";
        for (const auto& e : v) {
            msg += "\n  " + e.field + ": " + e.message;
        }
        throw UsageError(msg);
    }
    if (cfg.screening.effective_quadrupole(cfg.molecule.quadrupole) == 0.0 && !cfg.solver.allow_zero_quadrupole) {
        throw UsageError("eta*p = 0: the channel filter is undefined; pass --allow-zero-quadrupole");
    }
}

// ---------------------------------------------------------------- spectrum

Table spectrum_table(const tra::model::SpectrumReport& rep, const std::string& units) {
    std::vector<std::string> cols{"ell", "m", "E_theta", "level"};
    if (units != "hartree") {
        cols.push_back("eps_table_units");
    }
    if (units != "table") {
        cols.push_back("E_hartree");
    }
    cols.push_back("plateau_spread");
    Table t(cols);
    for (const auto& row : rep.rows) {
        for (std::size_t k = 0; k < row.spectrum.levels.size(); ++k) {
            const auto& lvl = row.spectrum.levels[k];
            std::vector<json> r{row.channel.ell, row.channel.m, num(row.channel.e_theta), static_cast<int>(k)};
            if (units != "hartree") {
                r.push_back(num(lvl.eps_table));
            }
            if (units != "table") {
                r.push_back(num(lvl.e_hartree));
            }
            r.push_back(num(lvl.spread));
            t.add(std::move(r));
        }
    }
    return t;
}

std::string render_report(const tra::model::SpectrumReport& rep, const std::string& format, const std::string& units) {
    const Table t = spectrum_table(rep, units);
    if (format != "json") {
        std::string out = t.render(format);
        if (format == "text") {
            out += "levels: " + std::to_string(rep.level_count()) + "  channels: " + std::to_string(rep.rows.size()) +
                   "  ell_max: " + std::to_string(rep.ell_max) + "\n";
            if (rep.negative_quadrupole) {
                out += "warning: eta*p < 0; filter applied literally, review the channel set\n";
            }
        }
        return out;
    }
    json doc;
    doc["molecule"] = {{"Z", rep.molecule.Z},
                       {"dipole", num(rep.molecule.dipole)},
                       {"quadrupole", num(rep.molecule.quadrupole)}};
    doc["screening"] = {{"Q", rep.choice.Q}, {"lambda", num(rep.choice.lambda)}, {"eta", num(rep.choice.eta)}};
    doc["convention"] = tra::model::to_string(rep.convention);
    doc["ell_max"] = rep.ell_max;
    doc["negative_quadrupole"] = rep.negative_quadrupole;
    json channels = json::array();
    for (const auto& row : rep.rows) {
        channels.push_back({{"ell", row.channel.ell},
                            {"m", row.channel.m},
                            {"E_theta", num(row.channel.e_theta)},
                            {"A", num(row.params.A)},
                            {"B", num(row.params.B)},
                            {"C", num(row.params.C)},
                            {"lambda", num(row.params.lambda)},
                            {"levels", row.spectrum.size()}});
    }
    doc["channels"] = channels;
    doc["rows"] = json::parse(t.render("json"));
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- table1

struct ReferenceRow {
    int ell;
    int m;
    double e_theta;
    std::vector<double> eps;
};

const std::vector<ReferenceRow>& reference_rows() {
    static const std::vector<ReferenceRow> rows{
        {0, 0, -29.336747, {458.70220564, 201.89558358, 83.02498131, 29.27760795, 6.7669578, 0.175}},
        {0, 1, -18.028503, {98.32461711, 30.95016950, 6.3724845, 0.099}},
        {0, 2, -7.279835, {4.41151545}},
        {1, 0, -23.414383, {225.280359848, 87.366542332, 29.136472495, 6.28034949, 0.109}},
        {1, 1, -12.362103, {29.004443567, 5.05763725}},
        {2, 0, -17.193036, {84.506325074, 25.319280377, 4.49358085}},
        {2, 1, -6.360787, {2.517451}},
        {3, 0, -10.624897, {17.45549174, 1.86655}},
        {4, 0, -3.653598, {0.074}},
    };
    return rows;
}

// Half a unit in the fifth significant digit for |eps| >= 1, 0.01 below.
double level_tolerance(double ref) {
    if (std::abs(ref) < 1.0) {
        return 1e-2;
    }
    return 0.5 * std::pow(10.0, std::floor(std::log10(std::abs(ref))) - 4.0);
}


struct Table1Options {
    int N = 100;
    std::string format = "text";
    std::string path;
    double perturb = 0.0;
};

int cmd_table1(const Table1Options& opt) {
    tra::model::SolverConfig solver;
    solver.N = opt.N;
    solver.convention = tra::model::ScaleConvention::charge_scaled;
    const auto rep = tra::model::run_procedure({12, 35.0, 7.0}, {8, 0.2, 0.3}, solver);
    const bool reference = opt.N == 100;

    Table t({"ell", "m", "level", "reference", "computed", "abs_diff", "tolerance", "status"});
    bool ok = rep.rows.size() == reference_rows().size();
    for (std::size_t i = 0; i < reference_rows().size(); ++i) {
        const ReferenceRow& ref = reference_rows()[i];
        const tra::model::ChannelSpectrum* row = nullptr;
        for (const auto& r : rep.rows) {
            if (r.channel.ell == ref.ell && r.channel.m == ref.m) {
                row = &r;
            }
        }
        const std::size_t computed = row ? row->spectrum.size() : 0;
        if (row && std::abs(row->channel.e_theta - ref.e_theta) > 1e-6) {
            ok = false;
        }
        for (std::size_t k = 0; k < std::max(ref.eps.size(), computed); ++k) {
            if (k >= ref.eps.size()) {
                const double c = row->spectrum.levels[k].eps_table;
                t.add({ref.ell, ref.m, static_cast<int>(k), nullptr, num(c), nullptr, nullptr, "extra"});
                ok = false;
                continue;
            }
            const double r = ref.eps[k] * (1.0 + opt.perturb);
            const double tol = level_tolerance(ref.eps[k]);
            if (k >= computed) {
                t.add({ref.ell, ref.m, static_cast<int>(k), num(r), nullptr, nullptr, num(tol), "missing"});
                ok = false;
                continue;
            }
            const double c = row->spectrum.levels[k].eps_table;
            const double d = std::abs(c - r);
            const bool pass = d <= tol;
            ok = ok && pass;
            t.add({ref.ell, ref.m, static_cast<int>(k), num(r), num(c), num(d), num(tol), pass ? "pass" : "FAIL"});
        }
    }
    std::string out = t.render(opt.format);
    if (opt.format != "json") {
        out += std::string(reference ? "" : "non-reference run (N=" + std::to_string(opt.N) + "); ") +
               "verdict: " + (ok ? "PASS" : "FAIL") + " (" + std::to_string(rep.level_count()) + " levels, " +
               std::to_string(rep.rows.size()) + " channels)\n";
    } else {
        json doc;
        doc["N"] = opt.N;
        doc["reference"] = reference;
        doc["pass"] = ok;
        doc["levels"] = json::parse(out);
        out = doc.dump(2) + "\n";
    }
    emit(out, opt.path);
    if (!reference) {
        return kOk;
    }
    return ok ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bound states of an electron in a screened charge, dipole and quadrupole field"};
    app.require_subcommand(1);
    const std::vector<std::string> formats{"csv", "json", "text"};

    // angular
    auto* angular = app.add_subcommand("angular", "Angular separation constants E_theta per (ell, m)");
    double a_qd = 0.0;
    int a_ell_min = 0;
    int a_ell_max = 4;
    int a_count = 3;
    double a_tol = 1e-9;
    int a_size = tra::angular::kDefaultSize;
    std::string a_format = "csv";
    std::string a_path;
    angular->add_option("--Qd", a_qd, "Dipole moment (e a0)")->required()->check(CLI::NonNegativeNumber);
    angular->add_option("--ell-min", a_ell_min)->check(CLI::NonNegativeNumber);
    angular->add_option("--ell-max", a_ell_max)->check(CLI::NonNegativeNumber);
    angular->add_option("--count", a_count, "Eigenvalues per ell")->check(CLI::PositiveNumber);
    angular->add_option("--tol", a_tol, "Convergence tolerance under size doubling")->check(CLI::PositiveNumber);
    angular->add_option("--size", a_size, "Initial matrix size")->check(CLI::Range(2, tra::angular::kMaxSize));
    angular->add_option("--format", a_format)->check(CLI::IsMember(formats));
    angular->add_option("-o,--output", a_path);

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "Bound-state spectrum for a JSON run configuration");
    std::string s_config;
    std::optional<std::string> s_format;
    std::optional<std::string> s_units;
    std::optional<std::string> s_path;
    std::optional<std::string> s_convention;
    std::optional<int> s_N;
    bool s_allow_zero = false;
    spectrum->add_option("config", s_config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    spectrum->add_option("--format", s_format)->check(CLI::IsMember(formats));
    spectrum->add_option("--units", s_units)->check(CLI::IsMember({"table", "hartree", "both"}));
    spectrum->add_option("--convention", s_convention)->check(CLI::IsMember({"screening", "charge_scaled"}));
    spectrum->add_option("--N", s_N)->check(CLI::NonNegativeNumber);
    spectrum->add_option("-o,--output", s_path);
    spectrum->add_flag("--allow-zero-quadrupole", s_allow_zero, "Run the C = 0 path when eta*p = 0");

    // table1
    auto* table1 = app.add_subcommand("table1", "Regression against the bundled reference spectrum");
    Table1Options t1;
    table1->add_option("--N", t1.N, "Highest basis degree")->check(CLI::PositiveNumber);
    table1->add_option("--format", t1.format)->check(CLI::IsMember(formats));
    table1->add_option("-o,--output", t1.path);
    table1->add_option("--perturb-reference", t1.perturb, "Scale the reference by (1 + x); test mode")
        ->group("");

    // critical-dipole
    auto* critical = app.add_subcommand("critical-dipole", "Critical dipole moment per ell");
    std::vector<int> c_ells{0};
    int c_size = tra::angular::kDefaultSize;
    double c_tol = 1e-10;
    std::string c_format = "text";
    critical->add_option("--ell", c_ells, "Angular momentum (repeatable)")->check(CLI::NonNegativeNumber);
    critical->add_option("--size", c_size)->check(CLI::Range(2, tra::angular::kMaxSize));
    critical->add_option("--tol", c_tol)->check(CLI::PositiveNumber);
    critical->add_option("--format", c_format)->check(CLI::IsMember(formats));

    // limit-study
    auto* limit = app.add_subcommand("limit-study", "Ground level along lambda -> 0 at fixed A, B and C/lambda");
    double l_A = -20.0;
    double l_B = -2.0;
    double l_qq = 0.021;
    std::vector<double> l_lambdas{0.2, 0.1, 0.05, 0.025};
    int l_N = 100;
    std::string l_format = "text";
    limit->add_option("--A", l_A);
    limit->add_option("--B", l_B);
    limit->add_option("--Qq", l_qq, "Effective quadrupole eta*p");
    limit->add_option("--lambdas", l_lambdas)->delimiter(',');
    limit->add_option("--N", l_N)->check(CLI::NonNegativeNumber);
    limit->add_option("--format", l_format)->check(CLI::IsMember(formats));

    // tune
    auto* tune = app.add_subcommand("tune", "Grid search over (Q, lambda, eta) against target energies");
    std::string u_config;
    std::optional<std::string> u_format;
    tune->add_option("config", u_config, "Tuning configuration (JSON)")->required()->check(CLI::ExistingFile);
    tune->add_option("--format", u_format)->check(CLI::IsMember(formats));

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Finite-difference grid levels for given A, B, C, lambda");
    tra::hmd::PotentialParams o_params;
    tra::oracle::GridConfig o_grid;
    int o_count = 5;
    std::string o_format = "text";
    oracle->add_option("--A", o_params.A)->required();
    oracle->add_option("--B", o_params.B)->required();
    oracle->add_option("--C", o_params.C)->required();
    oracle->add_option("--lambda", o_params.lambda)->required()->check(CLI::PositiveNumber);
    oracle->add_option("--points", o_grid.points)->check(CLI::Range(1000, 100000000));
    oracle->add_option("--r-max", o_grid.r_max_scaled, "Box size in units of 1/lambda")->check(CLI::PositiveNumber);
    oracle->add_option("--count", o_count)->check(CLI::PositiveNumber);
    oracle->add_option("--format", o_format)->check(CLI::IsMember(formats));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*angular) {
            if (a_ell_max < a_ell_min) {
                throw UsageError("--ell-max must be >= --ell-min");
            }
            const auto table = tra::angular::build_channel_table(a_qd, a_ell_min, a_ell_max, a_count, a_size, a_tol);
            Table t({"ell", "m", "E_theta", "converged_digits"});
            for (const auto& ch : table.entries) {
                t.add({ch.ell, ch.m, num(ch.e_theta), table.converged_digits});
            }
            emit(t.render(a_format), a_path);
            return kOk;
        }
        if (*spectrum) {
            RunConfig cfg = parse_run_config(load_json(s_config));
            if (s_format) cfg.format = *s_format;
            if (s_units) cfg.units = *s_units;
            if (s_path) cfg.path = *s_path;
            if (s_convention) cfg.solver.convention = tra::model::parse_convention(*s_convention);
            if (s_N) cfg.solver.N = *s_N;
            if (s_allow_zero) cfg.solver.allow_zero_quadrupole = true;
            require_valid(cfg);
            const auto rep = tra::model::run_procedure(cfg.molecule, cfg.screening, cfg.solver);
            emit(render_report(rep, cfg.format, cfg.units), cfg.path);
            if (rep.negative_quadrupole) {
                std::cerr << "warning: eta*p < 0; filter applied literally, review the channel set\n";
            }
            return kOk;
        }
        if (*table1) {
            return cmd_table1(t1);
        }
        if (*critical) {
            Table t({"ell", "critical_dipole"});
            for (int ell : c_ells) {
                t.add({ell, num(tra::angular::critical_dipole(ell, c_size, c_tol))});
            }
            std::cout << t.render(c_format);
            return kOk;
        }
        if (*limit) {
            const auto study = tra::model::anion_limit_study(l_A, l_B, l_qq, l_lambdas, l_N);
            Table t({"lambda", "C", "Q", "eps", "E_hartree"});
            for (const auto& p : study.points) {
                t.add({num(p.lambda), num(p.C), num(p.Q), num(p.eps), num(p.e_hartree)});
            }
            if (l_format == "json") {
                json doc;
                doc["A"] = num(l_A);
                doc["B"] = num(l_B);
                doc["Qq"] = num(l_qq);
                doc["points"] = json::parse(t.render("json"));
                doc["slope"] = num(study.slope);
                std::cout << doc.dump(2) << "\n";
            } else {
                std::cout << t.render(l_format);
                std::cout << (l_format == "csv" ? "# " : "") << "slope d ln|E| / d ln lambda: " << fmt(study.slope)
                          << "\n";
            }
            return kOk;
        }
        if (*tune) {
            const json doc = load_json(u_config);
            RunConfig cfg = parse_run_config(doc, {"targets", "grid", "unmatched_penalty"});
            if (u_format) cfg.format = *u_format;
            require_valid(cfg, false);
            std::vector<double> targets;
            tra::model::TuneGrid grid;
            tra::model::TuneOptions topt;
            if (!doc.contains("targets") || !doc.contains("grid")) {
                throw UsageError("tune config needs 'targets' (hartree) and 'grid'");
            }
            read(doc, "targets", targets);
            const json& g = doc.at("grid");
            reject_unknown(g, {"Q", "lambda", "eta"}, "grid");
            read(g, "Q", grid.Q);
            read(g, "lambda", grid.lambda);
            read(g, "eta", grid.eta);
            if (doc.contains("unmatched_penalty")) {
                double pen = 0.0;
                read(doc, "unmatched_penalty", pen);
                topt.unmatched_penalty = pen;
            }
            const auto res = tra::model::tune_parameters(cfg.molecule, targets, grid, cfg.solver, topt);
            if (cfg.format == "json") {
                json out;
                out["best"] = {{"Q", res.best.Q}, {"lambda", num(res.best.lambda)}, {"eta", num(res.best.eta)}};
                out["misfit"] = num(res.misfit);
                out["evaluated"] = res.evaluated;
                out["skipped"] = res.skipped;
                out["report"] = json::parse(render_report(res.report, "json", cfg.units));
                emit(out.dump(2) + "\n", cfg.path);
            } else {
                std::string text = std::string(cfg.format == "csv" ? "# " : "") + "best Q=" +
                                   std::to_string(res.best.Q) + " lambda=" + fmt(res.best.lambda) +
                                   " eta=" + fmt(res.best.eta) + " misfit=" + fmt(res.misfit) +
                                   " evaluated=" + std::to_string(res.evaluated) +
                                   " skipped=" + std::to_string(res.skipped) + "\n";
                emit(text + render_report(res.report, cfg.format, cfg.units), cfg.path);
            }
            return kOk;
        }
        if (*oracle) {
            const auto gs = tra::oracle::grid_spectrum(o_params, o_grid, o_count);
            Table t({"level", "eps_table_units", "eps_coarse", "eps_fine", "E_hartree"});
            for (std::size_t k = 0; k < gs.eps.size(); ++k) {
                t.add({static_cast<int>(k), num(gs.eps[k]), num(gs.eps_coarse[k]), num(gs.eps_fine[k]),
                       num(-0.5 * o_params.lambda * o_params.lambda * gs.eps[k])});
            }
            std::cout << t.render(o_format);
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const tra::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const tra::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const tra::SearchFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const tra::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}
