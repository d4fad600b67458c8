#include "common.hpp"

#include "emspec/validation.hpp"

using namespace emspec;

TEST_SUITE("oracle") {

TEST_CASE("scale parameters") {
    CHECK(scale_from_string("desk") == Scale::Desk);
    CHECK(to_string(Scale::Paper) == "paper");
    CHECK_THROWS_AS(scale_from_string("huge"), ValidationError);
    const ScaleParams desk = scale_params(Scale::Desk);
    // the reservoir must not return emitted light before T
    for (double a : {0.02, 0.05, 0.1, 0.2}) CHECK(desk.n_modes(a) >= 1.3 * desk.t_final(a));
    const ScaleParams paper = scale_params(Scale::Paper);
    CHECK(paper.multiplicity == 12);
    CHECK(paper.n_modes(0.1) >= 500);
    CHECK(paper.t_final(0.1) >= 200.0);
}

TEST_CASE("tiny suite passes") {
    AcceptanceOptions opt;
    opt.scale = Scale::Tiny;
    const SuiteReport rep = run_oracle_suite(Scale::Tiny, opt);
    for (const auto& c : rep.checks) {
        CAPTURE(c.id);
        CAPTURE(c.detail);
        CHECK(c.passed);
    }
    CHECK(rep.to_json()["passed"] == rep.passed());
}

}
