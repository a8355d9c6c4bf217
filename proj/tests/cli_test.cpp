#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

const std::string kRoot = QRV_SOURCE_DIR;
const std::string kSamples = kRoot + "/samples";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = qrv::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string &name) {
    return (std::filesystem::temp_directory_path() / ("qrv_cli_test_" + name)).string();
}

} // namespace

TEST(Cli, IntegrateNineExample) {
    const auto r = run({"integrate", "--povm", kSamples + "/nine_vs_eleven/povm.json", "--qrv",
                        kSamples + "/nine_vs_eleven/qrv.json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_DOUBLE_EQ(j["norm"].get<double>(), 9.0);
    EXPECT_DOUBLE_EQ(j["integral"][0][0][0].get<double>(), 7.0);
    EXPECT_DOUBLE_EQ(j["integral"][1][1][0].get<double>(), 1.0);
}

TEST(Cli, InvalidEffectIsValidationError) {
    const auto r = run({"integrate", "--povm", kRoot + "/tests/data/not_psd_povm.json", "--qrv",
                        kSamples + "/nine_vs_eleven/qrv.json"});
    EXPECT_EQ(r.code, qrv::cli::kValidation);
    EXPECT_NE(r.err.find("MatrixNotPsd"), std::string::npos);
}

TEST(Cli, Norm1CertificateReverifies) {
    const auto cert = temp_path("l1.json");
    const auto r = run({"norm1", "--povm", kSamples + "/nine_vs_eleven/povm.json", "--qrv",
                        kSamples + "/nine_vs_eleven/qrv.json", "--certificate", cert});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(nlohmann::json::parse(r.out)["value"].get<double>(), 9.0, 1e-6);
    const auto v = run({"verify", cert});
    EXPECT_EQ(v.code, 0) << v.out;
    EXPECT_NE(v.out.find("l1-seminorm: verified"), std::string::npos);
}

TEST(Cli, MajorizeJoeVerducciOrders) {
    const std::vector<std::string> pair = {"--f", kSamples + "/joe_verducci/f.json", "--g",
                                           kSamples + "/joe_verducci/g.json"};
    for (const auto &[order, verdict] : std::vector<std::pair<std::string, std::string>>{
             {"s", "holds"}, {"t", "fails"}, {"b", "fails"}}) {
        auto args = std::vector<std::string>{"majorize", "--order", order};
        args.insert(args.end(), pair.begin(), pair.end());
        const auto cert = temp_path("jv_" + order + ".json");
        args.insert(args.end(), {"--certificate", cert});
        const auto r = run(args);
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(nlohmann::json::parse(r.out)["verdict"], verdict) << order;
        EXPECT_EQ(run({"verify", cert}).code, 0) << order;
    }
}

TEST(Cli, SeparateWithExternalSpace) {
    const auto r = run({"separate", "--space", kSamples + "/malamud/space.json", "--f",
                        kSamples + "/malamud/f.json", "--g", kSamples + "/malamud/g.json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(nlohmann::json::parse(r.out)["separated"].get<bool>());
}

TEST(Cli, ExamplesListAndRun) {
    const auto list = run({"paper-examples", "--list"});
    EXPECT_EQ(list.code, 0);
    EXPECT_NE(list.out.find("nine-vs-eleven"), std::string::npos);
    EXPECT_NE(list.out.find("malamud"), std::string::npos);
    const auto r = run({"paper-examples", "--only", "triangle", "--only", "joe-verducci"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("0 failed"), std::string::npos);
}

TEST(Cli, ExamplesFromSampleInstances) {
    const auto r = run({"paper-examples", "--instances", kSamples + "/examples"});
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, CorruptInstanceIsNonzero) {
    const auto r = run({"paper-examples", "--instances", kRoot + "/tests/data/corrupt"});
    EXPECT_EQ(r.code, qrv::cli::kValidation);
    EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
}

TEST(Cli, WrongValuesAreMismatch) {
    const auto r = run({"paper-examples", "--instances", kRoot + "/tests/data/mismatch", "--only", "nine-vs-eleven"});
    EXPECT_EQ(r.code, qrv::cli::kMismatch);
}

TEST(Cli, UnknownExampleAndBadFlags) {
    EXPECT_EQ(run({"paper-examples", "--only", "nope"}).code, qrv::cli::kValidation);
    EXPECT_EQ(run({}).code, qrv::cli::kValidation);
    EXPECT_EQ(run({"norm1", "--povm", "/nonexistent.json", "--qrv", "/nonexistent.json"}).code, qrv::cli::kValidation);
    EXPECT_EQ(run({"majorize", "--order", "x", "--f", kSamples + "/joe_verducci/f.json", "--g",
                   kSamples + "/joe_verducci/g.json"})
                  .code,
              qrv::cli::kValidation);
    EXPECT_EQ(run({"norm1", "--tol", "-1", "--povm", kSamples + "/nine_vs_eleven/povm.json", "--qrv",
                   kSamples + "/nine_vs_eleven/qrv.json"})
                  .code,
              qrv::cli::kValidation);
}

TEST(Cli, PropertySuiteDeterministic) {
    const auto a = run({"property-suite", "--trials", "2", "--seed", "7"});
    const auto b = run({"property-suite", "--trials", "2", "--seed", "7"});
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
    const auto empty = run({"property-suite", "--trials", "0"});
    EXPECT_EQ(empty.code, 0);
    EXPECT_NE(empty.out.find("total violations 0"), std::string::npos);
}

TEST(Cli, OutputsAreByteIdentical) {
    const std::vector<std::string> args = {"majorize", "--order", "s", "--f", kSamples + "/joe_verducci/f.json",
                                           "--g", kSamples + "/joe_verducci/g.json", "--seed", "9"};
    EXPECT_EQ(run(args).out, run(args).out);
}
