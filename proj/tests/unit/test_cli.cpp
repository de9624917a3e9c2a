// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"
#include "config.hpp"

#include "qmetro/ancilla.hpp"
#include "qmetro/error.hpp"

#include "corpus.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qmetro::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using qmetro::testing::Rng;

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qmetro_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const json& doc) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << doc.dump(2);
        return p.string();
    }

    static CliResult run(const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(args, out, err);
        return {code, out.str(), err.str()};
    }

    static json pauli_z_half(double tau, long long shots) {
        return json{{"schema_version", 1},
                    {"hamiltonian", {{0.5, 0.0}, {0.0, -0.5}}},
                    {"tau", tau},
                    {"shots", shots}};
    }

    static json optimal_two_level(double tau) {
        json doc = pauli_z_half(tau, 1);
        doc["state"] = {{"vector", {1.0, 1.0}}, {"normalize", true}};
        doc["povm"] = {{"eigenbasis_of", {{"re", {{0, 0}, {0, 0}}}, {"im", {{0, -1}, {1, 0}}}}}};
        return doc;
    }

    fs::path dir_;
};

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol) {
    ASSERT_EQ(a.rows(), b.rows());
    ASSERT_EQ(a.cols(), b.cols());
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol);
}

void expect_rounds_equal(const RoundProtocol& a, const RoundProtocol& b) {
    expect_matrix_near(a.initial.density(), b.initial.density(), 1e-12);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        EXPECT_NEAR(a.steps[k].duration, b.steps[k].duration, 1e-12);
        ASSERT_EQ(a.steps[k].control.size(), b.steps[k].control.size());
        for (std::size_t s = 0; s < a.steps[k].control.size(); ++s) {
            expect_matrix_near(a.steps[k].control[s].h0.matrix(), b.steps[k].control[s].h0.matrix(), 1e-12);
        }
        ASSERT_EQ(a.steps[k].policy.size(), b.steps[k].policy.size());
        for (const auto& [prefix, entry] : a.steps[k].policy) {
            const PolicyEntry& other = b.steps[k].policy.at(prefix);
            ASSERT_EQ(entry.kraus.size(), other.kraus.size());
            for (std::size_t i = 0; i < entry.kraus.size(); ++i) expect_matrix_near(entry.kraus[i], other.kraus[i], 1e-12);
            ASSERT_EQ(entry.unitaries.size(), other.unitaries.size());
            for (std::size_t i = 0; i < entry.unitaries.size(); ++i) {
                expect_matrix_near(entry.unitaries[i], other.unitaries[i], 1e-12);
            }
            EXPECT_EQ(entry.control.has_value(), other.control.has_value());
        }
    }
}

TEST_F(Cli, ConfigRoundTrip) {
    Rng rng(111);
    for (int trial = 0; trial < 30; ++trial) {
        ExperimentConfig c;
        const Index d = qmetro::testing::uniform_int(rng, 2, 4);
        c.hamiltonian = qmetro::testing::random_hermitian(rng, d);
        c.tau = qmetro::testing::uniform(rng, 0.1, 3.0);
        c.shots = qmetro::testing::uniform_int(rng, 1, 10000);
        c.state = trial % 2 ? qmetro::testing::random_pure(rng, d) : qmetro::testing::random_mixture(rng, d, 3);
        c.povm = qmetro::testing::random_povm(rng, d, 3);
        c.control = qmetro::testing::random_schedule(rng, d, c.tau, 3);
        c.seed = rng();
        c.repeats = 7;
        c.b_true = 0.01;
        c.estimator = EstimatorKind::observable_mean;
        qmetro::testing::FeedbackShape shape;
        shape.d = d;
        shape.tau = c.tau;
        shape.mixed_initial = trial % 3 == 0;
        c.protocol = trial % 2 ? qmetro::testing::random_feedback_protocol(rng, shape)
                               : qmetro::testing::random_two_round_protocol(rng, shape);

        const std::string text = serialize(c).dump();
        const ExperimentConfig back = parse_config_text(text);
        expect_matrix_near(back.hamiltonian->matrix(), c.hamiltonian->matrix(), 1e-12);
        expect_matrix_near(back.state->density(), c.state->density(), 1e-12);
        EXPECT_EQ(back.state->decomposition().size(), c.state->decomposition().size());
        ASSERT_EQ(back.povm->size(), c.povm->size());
        for (std::size_t a = 0; a < c.povm->size(); ++a) {
            expect_matrix_near(back.povm->elements()[a], c.povm->elements()[a], 1e-12);
        }
        ASSERT_EQ(back.control.size(), c.control.size());
        EXPECT_EQ(back.seed, c.seed);
        EXPECT_EQ(back.shots, c.shots);
        EXPECT_EQ(back.repeats, c.repeats);
        EXPECT_EQ(back.estimator, c.estimator);
        EXPECT_NEAR(back.tau, c.tau, 1e-15);

        const ProtocolSpec& p = *c.protocol;
        const ProtocolSpec& q = *back.protocol;
        EXPECT_EQ(p.variant, q.variant);
        EXPECT_EQ(p.rounds, q.rounds);
        if (p.variant == ProtocolVariant::multi_round) {
            ASSERT_EQ(p.round_policy.size(), q.round_policy.size());
            for (const auto& [key, r] : p.round_policy) expect_rounds_equal(r, q.round_policy.at(key));
        } else {
            expect_rounds_equal(p.round, q.round);
        }
        // A second pass is a fixed point.
        EXPECT_EQ(serialize(back).dump(), serialize(parse_config_text(serialize(back).dump())).dump());
    }
}

TEST_F(Cli, PresetsExpand) {
    const ExperimentConfig c = parse_config(json{
        {"hamiltonian", {{"preset", "ancilla_meas"}, {"ancillas", 3}}},
        {"state", {{"preset", "ancilla_initial"}, {"ancillas", 3}}},
        {"protocol", {{"preset", "ancilla"}, {"ancillas", 3}, {"tau", 2.0}}},
    });
    EXPECT_EQ(c.hamiltonian->dim(), 16);
    EXPECT_NEAR(spectral_spread(*c.hamiltonian), 4.0, 1e-12);
    EXPECT_EQ(c.protocol->round.steps.size(), 2u);
    EXPECT_NEAR(c.protocol->tau, 2.0, 0.0);
}

TEST_F(Cli, ParseErrors) {
    auto code = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code("{"), ErrorCode::ParseError);
    EXPECT_EQ(code("[1, 2]"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"schema_version": 2})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"shots": 0})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"shots": 2.5})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"seed": -3})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"hamiltonian": [[1, 2], [3]]})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"hamiltonian": {"preset": "nope"}})"), ErrorCode::ParseError);
    EXPECT_EQ(code(R"({"hamiltonian": [[0, 1], [0, 0]]})"), ErrorCode::NotHermitian);
    EXPECT_EQ(code(R"({"estimator": "median"})"), ErrorCode::ParseError);
}

TEST_F(Cli, BoundExample) {
    const std::string cfg = write("bound.json", pauli_z_half(1.0, 100));
    const CliResult r = run({"bound", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    const json report = json::parse(r.out);
    EXPECT_EQ(report.at("schema_version"), 1);
    EXPECT_NEAR(report.at("delta_b_min").get<double>(), 0.1, 1e-12);
    EXPECT_NEAR(report.at("spread").get<double>(), 1.0, 1e-12);
}

TEST_F(Cli, AncillaSpread) {
    const json doc{{"hamiltonian", {{"preset", "ancilla_meas"}, {"ancillas", 3}}}, {"tau", 1}, {"shots", 1}};
    const CliResult r = run({"bound", "--config", write("k3.json", doc)});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out).at("spread").get<double>(), 4.0, 1e-12);
}

TEST_F(Cli, ZeroSpreadExitsThree) {
    json doc = pauli_z_half(1.0, 1);
    doc["hamiltonian"] = {{1, 0}, {0, 1}};
    const CliResult r = run({"bound", "--config", write("id.json", doc)});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("zero eigenvalue spread"), std::string::npos);
    EXPECT_EQ(run({"optimize", "--config", write("id.json", doc)}).code, 3);
}

TEST_F(Cli, FisherExamples) {
    const CliResult r = run({"fisher", "--config", write("opt.json", optimal_two_level(1.7))});
    ASSERT_EQ(r.code, 0) << r.err;
    const json report = json::parse(r.out);
    EXPECT_NEAR(report.at("fisher_per_shot").get<double>(), 1.7 * 1.7, 1e-10);
    EXPECT_TRUE(report.at("regular").get<bool>());

    json eigen = optimal_two_level(1.0);
    eigen["state"] = {{"vector", {1.0, 0.0}}};
    const CliResult e = run({"fisher", "--config", write("eig.json", eigen)});
    ASSERT_EQ(e.code, 0) << e.err;
    const json er = json::parse(e.out);
    EXPECT_EQ(er.at("fisher_per_shot").get<double>(), 0.0);
    EXPECT_TRUE(er.at("delta_b_min").is_null());
}

TEST_F(Cli, RandomFisherNeverBeatsTheQuantumBound) {
    Rng rng(112);
    for (int trial = 0; trial < 20; ++trial) {
        ExperimentConfig c;
        c.hamiltonian = qmetro::testing::random_hermitian(rng, 4);
        c.state = qmetro::testing::random_pure(rng, 4);
        c.povm = qmetro::testing::random_povm(rng, 4, 5);
        c.shots = 50;
        const json report = cmd_fisher(c, {});
        EXPECT_GE(report.at("delta_b_min").get<double>(), report.at("quantum_bound").get<double>() * (1 - 1e-12));
    }
}

TEST_F(Cli, SingleStepProtocolMatchesFisher) {
    json doc = optimal_two_level(1.0);
    const ExperimentConfig plain = parse_config(doc);
    const json direct = cmd_fisher(plain, {});
    ExperimentConfig with = plain;
    with.protocol = make_simple_protocol(*plain.state, *plain.hamiltonian, *plain.povm, 1.0);
    const json via = cmd_fisher(with, {});
    EXPECT_NEAR(via.at("fisher_per_shot").get<double>(), direct.at("fisher_per_shot").get<double>(), 1e-12);
    ASSERT_EQ(via.at("outcomes").size(), direct.at("outcomes").size());
    for (std::size_t a = 0; a < direct.at("outcomes").size(); ++a) {
        EXPECT_NEAR(via["outcomes"][a]["p0"].get<double>(), direct["outcomes"][a]["p0"].get<double>(), 1e-12);
        EXPECT_NEAR(via["outcomes"][a]["dp"].get<double>(), direct["outcomes"][a]["dp"].get<double>(), 1e-12);
    }
}

TEST_F(Cli, SimulateNeedsASeed) {
    json doc = optimal_two_level(1.0);
    doc["shots"] = 100;
    doc["repeats"] = 5;
    const std::string cfg = write("sim.json", doc);
    const CliResult missing = run({"simulate", "--config", cfg});
    EXPECT_EQ(missing.code, 2);
    EXPECT_NE(missing.err.find("seed"), std::string::npos);
    const CliResult a = run({"simulate", "--config", cfg, "--seed", "9"});
    const CliResult b = run({"simulate", "--config", cfg, "--seed", "9"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(run({"simulate", "--config", cfg, "--seed", "-3"}).code, 2);
    doc["seed"] = 9;
    EXPECT_EQ(run({"simulate", "--config", write("seeded.json", doc)}).out, a.out);
}

TEST_F(Cli, SimulateAncillaReproducesHeisenbergScaling) {
    const json doc{{"protocol", {{"preset", "ancilla"}, {"ancillas", 3}}},
                   {"tau", 1.0},
                   {"shots", 10000},
                   {"repeats", 200},
                   {"seed", 2026}};
    const CliResult r = run({"simulate", "--config", write("anc.json", doc)});
    ASSERT_EQ(r.code, 0) << r.err;
    const json report = json::parse(r.out);
    EXPECT_NEAR(report.at("sd").get<double>(), 1.0 / (4.0 * 100.0), 0.15 / 400.0);
    EXPECT_TRUE(report.at("audit").at("pass").get<bool>());
}

TEST_F(Cli, CsvOutput) {
    const CliResult r =
        run({"fisher", "--config", write("opt.json", optimal_two_level(1.0)), "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "label,dp,p0");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
    const CliResult b = run({"bound", "--config", write("b.json", pauli_z_half(1, 100)), "--format", "csv"});
    EXPECT_EQ(b.out.substr(0, b.out.find('\n')), "key,value");
    EXPECT_NE(b.out.find("delta_b_min,0.1"), std::string::npos);
}

TEST_F(Cli, OutFile) {
    const fs::path target = dir_ / "report.json";
    const CliResult r =
        run({"optimize", "--config", write("opt.json", optimal_two_level(1.0)), "--out", target.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(target);
    const json report = json::parse(in);
    EXPECT_NEAR(report.at("saturation_ratio").get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(report.at("scan").at("alpha").get<double>(), std::acos(-1.0) / 2.0, 0.02);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bound"}).code, 2);
    EXPECT_EQ(run({"frobnicate", "--config", "x"}).code, 2);
    EXPECT_EQ(run({"bound", "--config", (dir_ / "missing.json").string()}).code, 2);
    EXPECT_EQ(run({"bound", "--config", write("b.json", pauli_z_half(1, 1)), "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, ExitCodeMapping) {
    EXPECT_EQ(exit_code_for(Error(ErrorCode::ParseError, "")), ExitCode::parse);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::NotHermitian, "")), ExitCode::parse);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::ZeroSpread, "")), ExitCode::zero_spread);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::CrossCheckFailure, "")), ExitCode::cross_check);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::NonRegular, "")), ExitCode::cross_check);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::Blowup, "")), ExitCode::enumeration);
    EXPECT_EQ(exit_code_for(Error(ErrorCode::PolicyGap, "")), ExitCode::enumeration);
}

TEST_F(Cli, PolicyGapExitsFive) {
    // Step 2 only knows what to do after outcome 0.
    const json identity = json::array({json::array({1, 0}), json::array({0, 1})});
    const json up = json::array({json::array({1, 0}), json::array({0, 0})});
    const json down = json::array({json::array({0, 0}), json::array({0, 1})});
    json first{{"duration", 0.5}, {"policy", {{"", {{"kraus", json::array({up, down})}}}}}};
    json second{{"duration", 0.5}, {"policy", {{"0", {{"kraus", json::array({identity})}}}}}};
    json doc = pauli_z_half(1.0, 1);
    doc["protocol"] = {{"variant", "feedback"},
                       {"round",
                        {{"initial", {{"vector", {1, 1}}, {"normalize", true}}},
                         {"steps", json::array({first, second})}}}};
    const CliResult r = run({"fisher", "--config", write("gap.json", doc)});
    EXPECT_EQ(r.code, 5) << r.err;
    EXPECT_NE(r.err.find("no policy"), std::string::npos);
}

TEST_F(Cli, BinaryExitCodes) {
    auto status = [](const std::string& args) {
        const std::string cmd = std::string(QMETRO_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    const std::string data = QMETRO_TEST_DATA;
    EXPECT_EQ(status("bound --config " + data + "/identity.json"), 3);
    EXPECT_EQ(status("bound --config " + write("b.json", pauli_z_half(1, 100))), 0);
    EXPECT_EQ(status("simulate --config " + write("b.json", optimal_two_level(1.0))), 2);
    EXPECT_EQ(status("--help"), 0);
}

}  // namespace
}  // namespace qmetro::cli
