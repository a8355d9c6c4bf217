// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qrv/catalog.hpp"
#include "qrv/property_suite.hpp"

using namespace qrv;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs a catalog example; all checks must pass and the wall time must stay under the limit.
Outcome example(const std::string &id, double limit_s) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = catalog::find(id)->run(std::nullopt);
    const double dt = seconds_since(t0);
    Outcome o;
    std::size_t failed = 0;
    for (const auto &c : checks) {
        if (!c.ok) {
            ++failed;
            o.detail += " [" + c.name + ": " + c.detail + "]";
        }
    }
    o.ok = failed == 0 && dt < limit_s;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu/%zu checks, %.3f s (limit %.0f s)", checks.size() - failed, checks.size(), dt,
                  limit_s);
    o.detail = buf + o.detail;
    return o;
}

// Tallies whose name contains any key; each must have at least min_checks checks and no violations.
Outcome tallies(const suite::Report &r, const std::vector<std::string> &keys, std::size_t min_checks,
                bool exclude = false) {
    Outcome o;
    std::size_t groups = 0;
    std::size_t checks = 0;
    std::size_t violations = 0;
    for (const auto &t : r.tallies) {
        bool hit = false;
        for (const auto &k : keys) {
            hit = hit || t.name.find(k) != std::string::npos;
        }
        if (hit == exclude) {
            continue;
        }
        ++groups;
        checks += t.checks;
        violations += t.violations;
        if (t.checks < min_checks || t.violations > 0) {
            o.ok = false;
            o.detail += " [" + t.name + ": " + std::to_string(t.checks) + " checks, " +
                        std::to_string(t.violations) + " violations]";
        }
    }
    o.ok = o.ok && groups > 0;
    o.detail = std::to_string(groups) + " properties, " + std::to_string(checks) + " checks, " +
               std::to_string(violations) + " violations" + o.detail;
    return o;
}

} // namespace

int main() {
    const std::vector<std::string> other_groups = {"partial sums", "LP answer", "Birkhoff", "separation",
                                                   "independent of rho"};

    std::fprintf(stdout, "running property suite (seed 42, 200 trials)...\n");
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = suite::run({42, 200});
    const double suite_s = seconds_since(t0);

    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"9-vs-11 seminorm example", [] { return example("nine-vs-eleven", 1.0); }},
        {"triangle-inequality counterexample", [] { return example("triangle", 1.0); }},
        {"Joe-Verducci: S holds, T and B fail", [] { return example("joe-verducci", 5.0); }},
        {"Malamud: T holds, B infeasible, separated", [] { return example("malamud", 60.0); }},
        {"norm inequalities on 200 random instances",
         [&] {
             auto o = tallies(report, other_groups, 200, true);
             o.ok = o.ok && suite_s < 180.0;
             o.detail += ", suite " + std::to_string(suite_s) + " s (limit 180 s)";
             return o;
         }},
        {"scalar equivalence on 200 pairs", [&] { return tallies(report, {"partial sums", "LP answer"}, 200); }},
        {"Birkhoff on 50 matrices", [&] { return tallies(report, {"Birkhoff"}, 50); }},
        {"separation forward (100 x 50) and converse (50)",
         [&] {
             auto fwd = tallies(report, {"separation forward"}, 5000);
             auto conv = tallies(report, {"separation converse"}, 50);
             return Outcome{fwd.ok && conv.ok, fwd.detail + "; " + conv.detail};
         }},
        {"rho-invariance of integration", [&] { return tallies(report, {"independent of rho"}, 400); }},
        {"swap truncation: growth under conjugation, bounded seminorm",
         [] { return example("swap-truncation", 10.0); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto o = criteria[i].second();
        failed += o.ok ? 0 : 1;
        std::fprintf(stdout, "%s criterion %zu: %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                     o.detail.c_str());
    }
    std::fprintf(stdout, "%d of %zu criteria failed; unconverged seminorm solves in the suite: %zu\n", failed,
                 criteria.size(), report.unconverged);
    return failed == 0 ? 0 : 1;
}
