#include "mesolead/scenario.hpp"

#include "mesolead/fock.hpp"
#include "mesolead/gaussian.hpp"
#include "mesolead/lyapunov.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace mesolead {

using nlohmann::json;

namespace {

constexpr std::uint64_t kOracleSeed = 20240917;

struct KindName {
    ScenarioKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {ScenarioKind::ThermalizationSweep, "thermalization-sweep"},
    {ScenarioKind::EntropyRates, "entropy-rates"},
    {ScenarioKind::BudgetSingle, "budget-single"},
    {ScenarioKind::BudgetMulti, "budget-multi"},
    {ScenarioKind::OracleCheck, "oracle-check"},
};

LeadSpec lead(int modes, double temperature) {
    LeadSpec l;
    l.modes = modes;
    l.half_bandwidth = 10.0;
    l.coupling = 1.0;
    l.temperature = temperature;
    l.chemical_potential = 0.0;
    return l;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows nothing, returns the
// exception (if any) of every task.
template <class Fn>
std::vector<std::exception_ptr> parallelFor(std::size_t n, int threads, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto count = static_cast<std::size_t>(std::max(1, threads));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(count, n); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return errors;
}

std::string describe(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

template <class T>
T get(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void rejectUnknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; })) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

LeadSpec leadFromJson(const json& j, LeadSpec base) {
    rejectUnknown(j, {"modes", "half_bandwidth", "coupling", "temperature", "chemical_potential"}, "lead");
    if (j.contains("modes")) base.modes = get<int>(j, "modes");
    if (j.contains("half_bandwidth")) base.half_bandwidth = get<double>(j, "half_bandwidth");
    if (j.contains("coupling")) base.coupling = get<double>(j, "coupling");
    if (j.contains("temperature")) base.temperature = get<double>(j, "temperature");
    if (j.contains("chemical_potential")) base.chemical_potential = get<double>(j, "chemical_potential");
    return base;
}

json leadToJson(const LeadSpec& l) {
    return {{"modes", l.modes},
            {"half_bandwidth", l.half_bandwidth},
            {"coupling", l.coupling},
            {"temperature", l.temperature},
            {"chemical_potential", l.chemical_potential}};
}

int stepsFor(double dt, double t) { return static_cast<int>(std::lround(t / dt)); }

} // namespace

std::string scenarioName(ScenarioKind kind) {
    for (const auto& k : kKindNames)
        if (k.kind == kind) return k.name;
    return "unknown";
}

ScenarioKind parseScenarioKind(const std::string& name) {
    for (const auto& k : kKindNames)
        if (name == k.name) return k.kind;
    throw ConfigError("unknown scenario '" + name + "'");
}

ScenarioConfig defaultConfig(ScenarioKind kind) {
    ScenarioConfig c;
    c.kind = kind;
    c.system = uniformChain(1, 1.0, 1.0, {0});
    c.initial_occupations = {0.5};
    switch (kind) {
    case ScenarioKind::ThermalizationSweep:
        c.leads = {lead(16, 1.0)};
        c.sweep = {{1, 2, 3, 4}, {16, 32, 64, 128, 256}, {0.5, 1.0, 5.0}};
        break;
    case ScenarioKind::EntropyRates:
        c.leads = {lead(100, 1.0)};
        c.sweep = {{1}, {5, 100}, {0.1, 1.0}};
        c.t_max = 20.0;
        c.record_interval = 0.05;
        break;
    case ScenarioKind::BudgetSingle:
        c.leads = {lead(100, 1.0)};
        c.t_max = 20.0;
        break;
    case ScenarioKind::BudgetMulti:
        c.system = uniformChain(1, 1.0, 1.0, {0, 0});
        c.leads = {lead(100, 0.5), lead(100, 1.0)};
        // the final quarter [37.5, 50] avoids the lead recurrence at t = pi L / W ~ 31.4
        c.t_max = 50.0;
        c.record_interval = 0.2;
        break;
    case ScenarioKind::OracleCheck:
        c.leads = {lead(3, 1.0)};
        c.sweep = {{1}, {2, 3, 4}, {1.0}};
        c.t_max = 10.0;
        break;
    }
    return c;
}

ScenarioConfig configFromJson(ScenarioKind kind, const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    rejectUnknown(doc,
                  {"scenario", "system", "leads", "sweep", "dt", "t_max", "record_interval", "initial_occupations",
                   "output_dir", "threads"},
                  "config");
    if (doc.contains("scenario") && parseScenarioKind(get<std::string>(doc, "scenario")) != kind) {
        throw ConfigError("config is for scenario '" + get<std::string>(doc, "scenario") + "', not '" +
                          scenarioName(kind) + "'");
    }
    ScenarioConfig c = defaultConfig(kind);

    if (doc.contains("leads")) {
        const json& arr = doc.at("leads");
        if (!arr.is_array() || arr.empty()) throw ConfigError("'leads' must be a non-empty array");
        const LeadSpec base = c.leads.front();
        c.leads.clear();
        for (const auto& l : arr) c.leads.push_back(leadFromJson(l, base));
    }

    bool attachmentGiven = false;
    if (doc.contains("system")) {
        const json& s = doc.at("system");
        rejectUnknown(s, {"sites", "onsite", "hopping", "attachment"}, "system");
        if (s.contains("sites")) c.system.sites = get<int>(s, "sites");
        if (c.system.sites < 1) throw ConfigError("system.sites must be >= 1");
        if (s.contains("hopping")) c.system.hopping = get<double>(s, "hopping");
        const double onsite0 = c.system.onsite.empty() ? 1.0 : c.system.onsite.front();
        if (s.contains("onsite") && s.at("onsite").is_number()) {
            c.system.onsite.assign(static_cast<std::size_t>(c.system.sites), get<double>(s, "onsite"));
        } else if (s.contains("onsite")) {
            c.system.onsite = get<std::vector<double>>(s, "onsite");
        } else {
            c.system.onsite.assign(static_cast<std::size_t>(c.system.sites), onsite0);
        }
        if (s.contains("attachment")) {
            attachmentGiven = true;
            c.system.attachment.clear();
            for (int site : get<std::vector<int>>(s, "attachment")) c.system.attachment.push_back(site - 1);
        }
        if (!doc.contains("initial_occupations")) {
            c.initial_occupations.assign(static_cast<std::size_t>(c.system.sites), 0.5);
        }
    }
    if (!attachmentGiven) c.system.attachment.assign(c.leads.size(), 0);

    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        rejectUnknown(s, {"N", "L", "T"}, "sweep");
        if (s.contains("N")) c.sweep.sites = get<std::vector<int>>(s, "N");
        if (s.contains("L")) c.sweep.modes = get<std::vector<int>>(s, "L");
        if (s.contains("T")) c.sweep.temperatures = get<std::vector<double>>(s, "T");
    }
    if (doc.contains("dt")) c.dt = get<double>(doc, "dt");
    if (doc.contains("t_max")) c.t_max = get<double>(doc, "t_max");
    if (doc.contains("record_interval")) c.record_interval = get<double>(doc, "record_interval");
    if (doc.contains("initial_occupations")) c.initial_occupations = get<std::vector<double>>(doc, "initial_occupations");
    if (doc.contains("output_dir")) c.output_dir = get<std::string>(doc, "output_dir");
    if (doc.contains("threads")) c.threads = get<int>(doc, "threads");
    return c;
}

ScenarioConfig loadConfig(ScenarioKind kind, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return configFromJson(kind, ss.str());
}

void validate(const ScenarioConfig& c) {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) fail("dt must be > 0");
    if (!(c.t_max > c.dt) || !std::isfinite(c.t_max)) fail("t_max must exceed dt");
    if (!(c.record_interval > 0.0)) fail("record_interval must be > 0");
    if (c.threads < 1) fail("threads must be >= 1");
    if (c.system.sites < 1) fail("system.sites must be >= 1");
    if (static_cast<int>(c.system.onsite.size()) != c.system.sites) fail("system.onsite needs one entry per site");
    if (!(c.system.hopping >= 0.0)) fail("system.hopping must be >= 0");
    if (c.leads.empty()) fail("at least one lead is required");
    if (c.system.attachment.size() != c.leads.size()) fail("system.attachment needs one site per lead");
    for (int site : c.system.attachment)
        if (site < 0 || site >= c.system.sites) fail("lead attachment site outside the chain (sites are 1-based)");
    for (const auto& l : c.leads) {
        if (l.modes < 1) fail("lead modes must be >= 1");
        if (!(l.half_bandwidth > 0.0)) fail("lead half_bandwidth must be > 0");
        if (!(l.coupling > 0.0)) fail("lead coupling must be > 0");
        if (!(l.temperature > 0.0)) fail("lead temperature must be > 0");
    }
    if (static_cast<int>(c.initial_occupations.size()) != c.system.sites) {
        fail("initial_occupations needs one entry per site");
    }
    for (double n : c.initial_occupations)
        if (!(n >= 0.0 && n <= 1.0)) fail("initial occupations must lie in [0, 1]");

    switch (c.kind) {
    case ScenarioKind::ThermalizationSweep:
        if (c.sweep.sites.empty() || c.sweep.modes.empty() || c.sweep.temperatures.empty()) {
            fail("sweep lists N, L and T must be non-empty");
        }
        break;
    case ScenarioKind::EntropyRates:
        if (c.sweep.modes.empty() || c.sweep.temperatures.empty()) fail("sweep lists L and T must be non-empty");
        if (c.leads.size() != 1) fail("entropy-rates uses exactly one lead");
        break;
    case ScenarioKind::BudgetSingle:
        if (c.leads.size() != 1) fail("budget-single uses exactly one lead");
        break;
    case ScenarioKind::BudgetMulti:
        if (c.leads.size() < 2) fail("budget-multi needs at least two leads");
        break;
    case ScenarioKind::OracleCheck:
        if (c.sweep.modes.empty()) fail("sweep list L must be non-empty");
        break;
    }
    for (int n : c.sweep.sites)
        if (n < 1) fail("sweep N values must be >= 1");
    for (int l : c.sweep.modes)
        if (l < 1) fail("sweep L values must be >= 1");
    for (double t : c.sweep.temperatures)
        if (!(t > 0.0)) fail("sweep T values must be > 0");
}

std::string configToJson(const ScenarioConfig& c) {
    json leads = json::array();
    for (const auto& l : c.leads) leads.push_back(leadToJson(l));
    std::vector<int> attachment;
    for (int s : c.system.attachment) attachment.push_back(s + 1);
    json doc = {{"scenario", scenarioName(c.kind)},
                {"system",
                 {{"sites", c.system.sites},
                  {"onsite", c.system.onsite},
                  {"hopping", c.system.hopping},
                  {"attachment", attachment}}},
                {"leads", leads},
                {"sweep", {{"N", c.sweep.sites}, {"L", c.sweep.modes}, {"T", c.sweep.temperatures}}},
                {"dt", c.dt},
                {"t_max", c.t_max},
                {"record_interval", c.record_interval},
                {"initial_occupations", c.initial_occupations},
                {"output_dir", c.output_dir},
                {"threads", c.threads}};
    return doc.dump(2);
}

void writeCsv(std::ostream& os, const Table& table) {
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.columns.size()) {
            throw std::logic_error("writeCsv: row " + std::to_string(r) + " does not match the column count");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!std::isfinite(row[c])) {
                throw NumericalError("non-finite value in column '" + table.columns[c] + "' at row " +
                                     std::to_string(r));
            }
        }
    }
    std::ostringstream out;
    out << std::setprecision(17);
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << '\n';
    }
    os << out.str();
}

void writeCsv(const std::filesystem::path& path, const Table& table) {
    std::ostringstream buffer;
    writeCsv(buffer, table);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << buffer.str();
}

std::vector<ThermoRecord> runThermoTrajectory(const ExtendedModel& model, const std::vector<double>& init, double dt,
                                              double t_max, double record_interval, Quadrature rule) {
    const int steps = stepsFor(dt, t_max);
    const int stride = std::max(1, stepsFor(dt, record_interval));
    const Drift drift(model);
    const CovarianceMatrix C0 = initialCovariance(model, init);
    const CovarianceMatrix Css = steadyState(drift);
    ThermoTracker tracker(model, C0, dt, Css, rule);
    std::vector<ThermoRecord> records;
    propagate(drift, C0, dt, steps, [&](const StepView& v) {
        tracker.observe(v);
        if (v.index % stride == 0 || v.index == steps) records.push_back(tracker.record(v));
    });
    return records;
}

std::vector<std::string> thermoColumns(std::size_t leads) {
    std::vector<std::string> cols{"t"};
    for (std::size_t a = 1; a <= leads; ++a) {
        for (const char* name : {"I_E", "I_P", "I_Q", "J_E", "J_P", "J_Q", "S_L", "dF_L"}) {
            cols.push_back(std::string(name) + "." + std::to_string(a));
        }
    }
    for (const char* name : {"S_S", "S_SL", "sigma_int", "sigma_ext", "sigma_spohn", "Sigma_int", "Sigma_ext",
                             "mutual_or_total_corr", "budget_lhs", "budget_rhs", "budget_residual"}) {
        cols.emplace_back(name);
    }
    return cols;
}

std::vector<double> thermoRow(const ThermoRecord& rec) {
    std::vector<double> row{rec.t};
    for (const auto& l : rec.leads) {
        const auto& c = l.currents;
        row.insert(row.end(), {c.IE, c.IP, c.IQ, c.JE, c.JP, c.JQ, l.S_L, l.beta_dF});
    }
    const Budget b = budgetMultiBath(rec);
    row.insert(row.end(), {rec.S_S, rec.S_SL, rec.rates.sigma_int, rec.rates.sigma_ext, rec.rates.sigma_spohn,
                           rec.Sigma_int, rec.Sigma_ext, rec.correlations, b.lhs, b.rhs, b.residual});
    return row;
}

SweepRow thermalizationCell(const ScenarioConfig& config, int sites, int modes, double temperature) {
    LeadSpec l = config.leads.front();
    l.modes = modes;
    l.temperature = temperature;
    const double onsite = config.system.onsite.empty() ? 1.0 : config.system.onsite.front();
    const ExtendedModel model = buildModel(uniformChain(sites, onsite, config.system.hopping, {0}), {l});
    const CovarianceMatrix Css = steadyState(Drift(model));
    const CovarianceMatrix Cth = thermalCovariance(model, temperature, l.chemical_potential);
    SweepRow row;
    row.sites = sites;
    row.modes = modes;
    row.temperature = temperature;
    row.infidelity = 1.0 - fidelity(Css, Cth);
    row.rel_entropy = relativeEntropy(Css, Cth);
    return row;
}

SweepResult runThermalizationSweep(const ScenarioConfig& config) {
    validate(config);
    struct Cell {
        int N, L;
        double T;
    };
    std::vector<Cell> cells;
    for (int N : config.sweep.sites)
        for (int L : config.sweep.modes)
            for (double T : config.sweep.temperatures) cells.push_back({N, L, T});
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return std::tie(a.N, a.L, a.T) < std::tie(b.N, b.L, b.T);
    });
    std::vector<SweepRow> rows(cells.size());
    const auto errors = parallelFor(cells.size(), config.threads, [&](std::size_t i) {
        rows[i] = thermalizationCell(config, cells[i].N, cells[i].L, cells[i].T);
        if (!std::isfinite(rows[i].infidelity) || !std::isfinite(rows[i].rel_entropy)) {
            throw NumericalError("non-finite infidelity or relative entropy");
        }
    });
    SweepResult result;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (errors[i]) {
            std::ostringstream os;
            os << "N=" << cells[i].N << " L=" << cells[i].L << " T=" << cells[i].T << ": " << describe(errors[i]);
            result.failures.push_back(os.str());
        } else {
            result.rows.push_back(rows[i]);
        }
    }
    return result;
}

Table sweepTable(const SweepResult& result) {
    Table t;
    t.columns = {"N", "L", "T", "infidelity", "rel_entropy"};
    for (const auto& r : result.rows) {
        t.rows.push_back({double(r.sites), double(r.modes), r.temperature, r.infidelity, r.rel_entropy});
    }
    return t;
}

ExtendedModel modelFor(const ScenarioConfig& config) {
    validate(config);
    return buildModel(config.system, config.leads);
}

RatesCell entropyRatesCell(const ScenarioConfig& config, double temperature, int modes) {
    ScenarioConfig c = config;
    c.leads.front().temperature = temperature;
    c.leads.front().modes = modes;
    const ExtendedModel model = modelFor(c);
    RatesCell cell;
    cell.temperature = temperature;
    cell.modes = modes;
    cell.records = runThermoTrajectory(model, c.initial_occupations, c.dt, c.t_max, c.record_interval);
    return cell;
}

std::vector<RatesCell> runEntropyRates(const ScenarioConfig& config) {
    validate(config);
    std::vector<std::pair<double, int>> keys;
    for (double T : config.sweep.temperatures)
        for (int L : config.sweep.modes) keys.emplace_back(T, L);
    std::sort(keys.begin(), keys.end());
    std::vector<RatesCell> cells(keys.size());
    const auto errors = parallelFor(keys.size(), config.threads, [&](std::size_t i) {
        cells[i] = entropyRatesCell(config, keys[i].first, keys[i].second);
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return cells;
}

Table ratesTable(const std::vector<RatesCell>& cells) {
    Table t;
    t.columns = {"T", "L"};
    const auto cols = thermoColumns(1);
    t.columns.insert(t.columns.end(), cols.begin(), cols.end());
    for (const auto& cell : cells) {
        for (const auto& rec : cell.records) {
            std::vector<double> row{cell.temperature, double(cell.modes)};
            const auto r = thermoRow(rec);
            row.insert(row.end(), r.begin(), r.end());
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

std::vector<ThermoRecord> runBudget(const ScenarioConfig& config) {
    const ExtendedModel model = modelFor(config);
    return runThermoTrajectory(model, config.initial_occupations, config.dt, config.t_max, config.record_interval);
}

Table budgetTable(const std::vector<ThermoRecord>& records) {
    Table t;
    t.columns = thermoColumns(records.empty() ? 0 : records.front().leads.size());
    for (const auto& rec : records) t.rows.push_back(thermoRow(rec));
    return t;
}

std::vector<CheckResult> runOracleCheck(const ScenarioConfig& config) {
    validate(config);
    std::vector<CheckResult> checks = gaussianOracleChecks(50, 5, kOracleSeed);
    const std::vector<double> init(static_cast<std::size_t>(1), config.initial_occupations.front());
    for (int L : config.sweep.modes) {
        if (1 + L > fock::kMaxLindbladModes) throw ConfigError("oracle-check supports L <= 4");
        const ExtendedModel model = smallResonantLevel(L);
        checks.push_back(makeCheck("dynamics: RK4 vs Lindblad superoperator, L=" + std::to_string(L),
                                   lindbladDeviation(model, init, config.dt, config.t_max), 1e-8));
    }
    const ExtendedModel small = smallResonantLevel(3);
    checks.push_back(makeCheck("currents: covariance formulas vs Fock expectation values",
                               currentDeviation(small, init, config.dt, config.t_max), 1e-8));

    const auto records = runThermoTrajectory(small, init, config.dt, config.t_max, config.record_interval);
    double particle = 0.0, energy = 0.0;
    for (const auto& rec : records) {
        for (const auto& r : integralIdentities(rec)) {
            particle = std::max(particle, std::abs(r.particle));
            energy = std::max(energy, std::abs(r.energy));
        }
    }
    checks.push_back(makeCheck("integral identity: particles, L=3", particle, 1e-5));
    checks.push_back(makeCheck("integral identity: energy, L=3", energy, 1e-5));

    const double mutated = lindbladDeviation(smallResonantLevel(2), init, config.dt, 1.0, -1.0);
    checks.push_back(makeCheck("mutation: flipped dissipator sign is detected", mutated, 1e-8, true));
    return checks;
}

void printChecks(std::ostream& os, const std::vector<CheckResult>& checks) {
    std::ostringstream out;
    out << std::setprecision(3) << std::scientific;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": observed " << c.observed
            << (c.expect_above ? " (must exceed " : " (bound ") << c.bound << ")\n";
    }
    os << out.str();
}

} // namespace mesolead
