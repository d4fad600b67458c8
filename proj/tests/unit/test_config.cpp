#include "common.hpp"

using namespace emspec;

TEST_SUITE("config") {

TEST_CASE("parse with defaults") {
    const ExperimentConfig c = parse_config(R"(
name = "demo"
methods = ["PTNZE", "multiD1"]
[model]
kind = "JC"
lambda_c = 0.6
[bath]
alpha = 0.05
n_modes = 200
[initial]
qubit = "g"
fock_n = 1
)");
    CHECK(c.name == "demo");
    CHECK(c.model.kind == ModelKind::JC);
    CHECK(c.model.lambda_c == 0.6);
    CHECK(c.bath.n_modes == 200);
    CHECK(c.initial.qubit == QubitState::Ground);
    CHECK(c.initial.cavity_fock == 1);
    CHECK(c.times.t_end == ExperimentConfig{}.times.t_end);
    CHECK(c.wants("svg"));
}

TEST_CASE("round trip") {
    ExperimentConfig c;
    c.name = "rt";
    c.methods = {"PTNZE", "SNZE", "PTBRE", "multiD1@JC"};
    c.model.lambda_c = 0.3;
    c.bath.alpha = 0.123456789012345;
    c.times = {37.5, 0.015, 0.05};
    c.davydov.seed = 18446744073709551557ull;
    c.davydov.dt = 0.025;
    c.fit.max_terms = 5;
    c.outputs.formats = {"csv"};
    const ExperimentConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
    CHECK(serialize_config(back) == serialize_config(c));
}

TEST_CASE("every preset parses and round-trips") {
    const auto names = preset_names();
    CHECK(std::find(names.begin(), names.end(), "fig2-alpha0.05-e0") != names.end());
    CHECK(std::find(names.begin(), names.end(), "fig6-g1") != names.end());
    for (const auto& n : names) {
        CAPTURE(n);
        const ExperimentConfig c = load_config(preset_path(n));
        CHECK(parse_config(serialize_config(c)) == c);
    }
}

TEST_CASE("the headline presets") {
    const ExperimentConfig f2 = load_config(preset_path("fig2-alpha0.05-e0"));
    CHECK(f2.model.kind == ModelKind::Rabi);
    CHECK(f2.model.lambda_c == 0.3);
    CHECK(f2.initial.qubit == QubitState::Excited);
    CHECK(f2.methods == std::vector<std::string>{"PTNZE", "SNZE", "PTBRE", "multiD1"});
    const ExperimentConfig f6 = load_config(preset_path("fig6-g1"));
    CHECK(f6.model.lambda_c == 0.6);
    CHECK(f6.bath.alpha == 0.05);
    CHECK(f6.initial.cavity_fock == 1);
    CHECK(parse_method_entry(f6.methods[1], f6.model.kind).model == ModelKind::JC);
}

TEST_CASE("method entries") {
    const MethodEntry e = parse_method_entry("PTNZE@JC", ModelKind::Rabi);
    CHECK(e.method == "PTNZE");
    CHECK(e.model == ModelKind::JC);
    CHECK(parse_method_entry("multiD1", ModelKind::JC).model == ModelKind::JC);
    CHECK_THROWS_AS(parse_method_entry("PTNZE@Dicke", ModelKind::Rabi), ValidationError);
    CHECK_THROWS_AS(parse_method_entry("Lindblad", ModelKind::Rabi), ValidationError);
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(parse_config("methods = []"), ValidationError);
    CHECK_THROWS_AS(parse_config("methods = [\"PTNZE\"]\n[bath]\nalpha = -1.0"), ValidationError);
    CHECK_THROWS_AS(parse_config("methods = [\"PTNZE\"]\n[model]\nkind = \"Dicke\""), ValidationError);
    CHECK_THROWS_AS(parse_config("methods = [\"PTNZE\"]\n[initial]\nfock_n = 10"), ValidationError);
    CHECK_THROWS_AS(parse_config("methods = [\"PTNZE\"]\n[times]\nT = \"long\""), ValidationError);
    CHECK_THROWS_AS(parse_config("methods = [\"PTNZE\"]\n[outputs]\nformats = [\"png\"]"), ValidationError);
    CHECK_THROWS_AS(parse_config("methods = [\"PTNZE\"]\n[davydov]\ndt = 0.5"), ValidationError);
    CHECK_THROWS_AS(parse_config("methods = [\"PTNZE\""), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.toml"), ValidationError);
    CHECK_THROWS_AS(preset_path("no-such-preset"), ValidationError);
}

}
