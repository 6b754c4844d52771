#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace eja;
using Catch::Approx;

TEST_CASE("element JSON round trip") {
    Rng rng(71);
    for (const std::string spec : {"classical:3", "spin:2", "cherm:2", "sum(classical:2,spin:2)"}) {
        auto alg = build_algebra(spec);
        const Element x = random_element(alg, rng);
        const nlohmann::json j = element_to_json(x);
        CHECK(j.at("algebra_spec").get<std::string>() == spec);
        const Element back = element_from_json(j);
        CHECK(same_algebra(back.algebra, alg));
        CHECK(norm(back - x) < 1e-15);
    }
    CHECK_THROWS_AS(element_from_json(nlohmann::json{{"coeffs", {1.0}}}), ParseError);
    CHECK_THROWS_AS(
        element_from_json(nlohmann::json{{"algebra_spec", "spin:2"}, {"coeffs", {1.0}}}),
        ParseError);
}

TEST_CASE("infinite values serialize as strings") {
    CHECK(json_value(std::numeric_limits<double>::infinity()) == nlohmann::json("+inf"));
    CHECK(json_value(-std::numeric_limits<double>::infinity()) == nlohmann::json("-inf"));
    CHECK(json_value(1.5) == nlohmann::json(1.5));
}

TEST_CASE("stein CSV schema") {
    CHECK(stein_csv_header() ==
          "n,pinched_rate,achievable_exponent,converse_bound,target,gap_bound");
    SteinRecord r;
    r.n = 3;
    r.pinched_rate = 0.125;
    r.achievable_exponent = 0.0625;
    r.converse_bound = -0.001;
    r.target = 0.25;
    r.gap_bound = 0.5;
    CHECK(stein_csv_row(r) == "3,0.125,0.0625,-0.001,0.25,0.5");
}

TEST_CASE("formatting is stable") {
    CHECK(fmt_double(0.1) == fmt_double(0.1));
    CHECK(fmt_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(fnv1a("abc") == fnv1a("abc"));
    CHECK(fnv1a("abc") != fnv1a("abd"));
}

TEST_CASE("entropy records carry quantity, s and value") {
    const nlohmann::json r = entropy_record("srr", 0.5, 1.25);
    CHECK(r.at("quantity") == "srr");
    CHECK(r.at("s") == 0.5);
    CHECK(r.at("value_nats") == 1.25);
    const nlohmann::json inf = entropy_record("D", 0.0, pos_infinity());
    CHECK(inf.at("value_nats") == "+inf");
}

TEST_CASE("embedding export carries basis images") {
    const nlohmann::json j = embedding_to_json(embed_spin(2));
    CHECK(j.at("source") == "spin:2");
    CHECK(j.at("target") == "cherm:2");
    REQUIRE(j.at("basis_images").size() == 3);
    // e1 -> sigma1: re = [[0,1],[1,0]]
    CHECK(j.at("basis_images")[1].at("re")[0][1] == 1.0);
    CHECK(j.at("basis_images")[1].at("im")[0][1] == 0.0);
}

TEST_CASE("matrix JSON layout is row-major re/im") {
    Eigen::MatrixXcd M(1, 2);
    M(0, 0) = std::complex<double>(1, 2);
    M(0, 1) = std::complex<double>(3, -4);
    const nlohmann::json j = matrix_to_json(M);
    CHECK(j.at("re")[0][0] == 1.0);
    CHECK(j.at("re")[0][1] == 3.0);
    CHECK(j.at("im")[0][0] == 2.0);
    CHECK(j.at("im")[0][1] == -4.0);
}
