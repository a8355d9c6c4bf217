#include <gtest/gtest.h>

#include "qrv/instances.hpp"
#include "qrv/json_io.hpp"
#include "qrv/verify.hpp"

using namespace qrv;
using io::json;

namespace {

ErrorKind kind_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    return ErrorKind::NonFinite; // sentinel: nothing thrown
}

json space_json() { return json::parse(R"({"atoms": ["p", "q"], "masses": [1, 2]})"); }

} // namespace

TEST(Json, ComplexAcceptsPairOrReal) {
    EXPECT_EQ(io::complex_from_json(json::parse("[1.5, -2]")), cplx(1.5, -2));
    EXPECT_EQ(io::complex_from_json(json::parse("3")), cplx(3, 0));
    EXPECT_EQ(kind_of([] { io::complex_from_json(json::parse("[1, 2, 3]")); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { io::complex_from_json(json::parse("\"x\"")); }), ErrorKind::Validation);
}

TEST(Json, MalformedTextReportsLineAndColumn) {
    try {
        io::parse_text("{\n  \"a\": [1,\n  2,, ]}", "in.json");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_NE(std::string(e.what()).find("in.json:3:5"), std::string::npos) << e.what();
    }
}

TEST(Json, PovmRoundTrip) {
    const auto ex = instances::nine_vs_eleven();
    const auto back = io::povm_from_json(io::parse_text(io::to_json(ex.nu).dump(), "t"));
    ASSERT_EQ(back.size(), ex.nu.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back.effect(i).matrix(), ex.nu.effect(i).matrix());
    }
    const auto f = io::qrv_from_json(io::parse_text(io::to_json(ex.f).dump(), "t"));
    EXPECT_EQ(f[0].matrix(), ex.f[0].matrix());
}

TEST(Json, AtomLabelsMustMatchSpace) {
    auto j = json::parse(R"({"dim": 1, "values": {"p": [[1]], "r": [[2]]}})");
    j["space"] = space_json();
    EXPECT_EQ(kind_of([&] { io::qrv_from_json(j); }), ErrorKind::Validation);
    j["values"] = json::parse(R"({"p": [[1]]})");
    EXPECT_EQ(kind_of([&] { io::qrv_from_json(j); }), ErrorKind::Validation);
    j["values"] = json::parse(R"({"p": [[1]], "q": [[1, 0], [0, 1]]})");
    EXPECT_EQ(kind_of([&] { io::qrv_from_json(j); }), ErrorKind::DimMismatch);
}

TEST(Json, EmbeddedSpaceMustAgreeWithSupplied) {
    auto j = json::parse(R"({"dim": 1, "values": {"p": [[1]], "q": [[2]]}})");
    j["space"] = space_json();
    const FiniteMeasureSpace other({"p", "q"}, {1, 3});
    EXPECT_EQ(kind_of([&] { io::qrv_from_json(j, other); }), ErrorKind::SpaceMismatch);
    j.erase("space");
    EXPECT_EQ(io::qrv_from_json(j, other).space().mass(1), 3.0);
    EXPECT_EQ(kind_of([&] { io::qrv_from_json(j); }), ErrorKind::Validation);
}

TEST(Json, NonHermitianEffectRejected) {
    auto j = json::parse(R"({"dim": 2, "effects": {"p": [[1, 1], [0, 1]], "q": [[1, 0], [0, 1]]}})");
    j["space"] = space_json();
    EXPECT_EQ(kind_of([&] { io::povm_from_json(j); }), ErrorKind::NotHermitian);
}

TEST(Verify, L1CertificateAndTampering) {
    const auto ex = instances::nine_vs_eleven();
    const auto cert = io::l1_certificate_to_json(l1_seminorm(ex.f, ex.nu), ex.nu, ex.f, 1e-6);
    EXPECT_TRUE(verify::check(cert).ok());

    auto lower = cert;
    lower["value"] = 8.5; // claims a smaller norm than the decomposition gives
    EXPECT_FALSE(verify::check(lower).ok());

    auto wrong_state = cert;
    wrong_state["dual"]["state"] = json::parse("[[[1,0],[0,0]],[[0,0],[1,0]]]"); // trace 2
    EXPECT_FALSE(verify::check(wrong_state).ok());

    auto broken = cert;
    broken["decomposition"]["f1"]["1"][0][0] = json::array({100.0, 0.0});
    EXPECT_FALSE(verify::check(broken).ok());
}

TEST(Verify, MajorizationTampering) {
    const auto ex = instances::joe_verducci();
    const auto cert = io::majorization_to_json(majorizes_B(ex.f, ex.g), ex.f, ex.g);
    ASSERT_TRUE(verify::check(cert).ok());
    auto flipped = cert;
    flipped["farkas"][0] = 0.0;
    flipped["farkas"][1] = 0.0;
    EXPECT_FALSE(verify::check(flipped).ok());

    const auto t = io::majorization_to_json(majorizes_T(ex.f, ex.g), ex.f, ex.g);
    ASSERT_TRUE(verify::check(t).ok());
    auto fake = t;
    fake["verdict"] = "holds";
    EXPECT_FALSE(verify::check(fake).ok());
}

TEST(Verify, SeparationTampering) {
    const auto ex = instances::malamud();
    const auto cert = io::separation_to_json(komiya_separate(ex.f, ex.g), ex.f, ex.g);
    ASSERT_TRUE(verify::check(cert).ok());
    auto bad = cert;
    for (auto &u : bad["u"]) {
        u = 0.0;
    }
    EXPECT_FALSE(verify::check(bad).ok());
}

TEST(Verify, UnknownKind) {
    EXPECT_EQ(kind_of([] { verify::check(json::parse(R"({"kind": "nothing"})")); }), ErrorKind::Validation);
}
