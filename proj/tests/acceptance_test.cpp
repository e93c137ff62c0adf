// Acceptance suite: runs every verification criterion at its pinned seeds
// and thresholds and prints one pass/fail line per criterion.
#include <cstdio>
#include <doctest.h>

#include "cointurn/verify.hpp"

using namespace cointurn;

TEST_CASE("acceptance criteria") {
    const VerifyReport report = run_verification(kDefaultMasterSeed);
    REQUIRE(report.criteria.size() == 14);

    for (const CriterionResult& cr : report.criteria) {
        std::printf("criterion %2d %s (%6.2fs)  %s\n", cr.number,
                    cr.passed ? "PASS" : "FAIL", cr.runtime_seconds, cr.name.c_str());
        for (const CheckResult& ck : cr.checks) {
            if (ck.passed) continue;
            if (ck.relation == "in")
                std::printf("    %-10s measured %.6g, needs in [%.6g, %.6g]\n",
                            ck.id.c_str(), ck.measured, ck.threshold, ck.threshold_hi);
            else
                std::printf("    %-10s measured %.6g, needs %s %.6g\n", ck.id.c_str(),
                            ck.measured, ck.relation.c_str(), ck.threshold);
        }
        INFO("criterion ", cr.number, " (", cr.name, ")");
        CHECK(cr.passed);
        CHECK(cr.runtime_seconds < cr.budget_seconds);
    }
    CHECK(report.all_passed);
}
