// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include <nnsimplify/nnet_io.hpp>

#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace nnsimplify;

TEST_CASE("identity network parses") {
    const NNetDocument doc = parse_nnet(testing::identity_nnet_text());
    CHECK(doc.num_layers == 2);
    CHECK(doc.layer_sizes == std::vector<int>{1, 1, 1});
    CHECK(doc.header_comments == std::vector<std::string>{"// identity test network"});
    CHECK(doc.weights[0].at(0, 0) == 1.0);
    CHECK(doc.biases[0][0] == 0.0);
    CHECK(doc.input_mins[0] == -1.0);
    CHECK(doc.input_maxes[0] == 1.0);
}

TEST_CASE("acas-shaped file parses to six hidden layers of fifty") {
    std::mt19937_64 rng(7);
    NNetDocument doc = testing::random_document(rng);
    doc.layer_sizes = {5, 50, 50, 50, 50, 50, 50, 5};
    doc.num_layers = 7;
    doc.input_size = 5;
    doc.output_size = 5;
    doc.max_layer_size = 50;
    doc.input_mins.assign(5, -1.0);
    doc.input_maxes.assign(5, 1.0);
    doc.means.assign(6, 0.0);
    doc.ranges.assign(6, 1.0);
    doc.weights.clear();
    doc.biases.clear();
    std::uniform_real_distribution<double> real(-1.0, 1.0);
    for (int i = 0; i < 7; ++i) {
        const auto rows = static_cast<std::size_t>(doc.layer_sizes[i + 1]);
        const auto cols = static_cast<std::size_t>(doc.layer_sizes[i]);
        Matrix w(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) w.at(r, c) = real(rng);
        }
        doc.weights.push_back(std::move(w));
        doc.biases.emplace_back(rows, 0.125);
    }

    const NNetDocument parsed = parse_nnet(write_nnet(doc));
    CHECK(parsed.layer_sizes == std::vector<int>{5, 50, 50, 50, 50, 50, 50, 5});
    int hidden = 0;
    for (std::size_t l = 1; l + 1 < parsed.layer_sizes.size(); ++l) {
        hidden += parsed.layer_sizes[l];
    }
    CHECK(hidden == 300);
    CHECK(parsed == doc);
}

TEST_CASE("missing weight row is a dimension mismatch") {
    // Drop one hidden-weight row from a 1-2-1 network body.
    const std::string text =
        "2,1,1,2,\n"
        "1,2,1,\n"
        "0,\n"
        "-1,\n"
        "1,\n"
        "0,0,\n"
        "1,1,\n"
        "1,\n"          // first weight row; the second is missing
        "0,\n"
        "0,\n"
        "0.5,0.5,\n"
        "0,\n";
    try {
        parse_nnet(text);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("round trip of the identity network") {
    const NNetDocument doc = parse_nnet(testing::identity_nnet_text());
    const std::string text = write_nnet(doc);
    CHECK(parse_nnet(text) == doc);
    CHECK(write_nnet(parse_nnet(text)) == text);
}

TEST_CASE("round trip of random documents is exact") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 25; ++i) {
        const NNetDocument doc = testing::random_document(rng);
        const std::string text = write_nnet(doc);
        const NNetDocument back = parse_nnet(text);
        REQUIRE(back == doc);
        REQUIRE(write_nnet(back) == text);
    }
}

TEST_CASE("negative weights keep their sign through serialization") {
    NNetDocument doc = parse_nnet(testing::identity_nnet_text());
    doc.weights[0].at(0, 0) = -2.0;
    const std::string text = write_nnet(doc);
    CHECK(text.find("-2,") != std::string::npos);
    CHECK(parse_nnet(text).weights[0].at(0, 0) == -2.0);
}

TEST_CASE("header errors") {
    CHECK_THROWS_AS(parse_nnet("1,2\n"), Error);
    try {
        parse_nnet("x,1,1,1,\n");
        FAIL();
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedHeader);
    }
    try {
        parse_nnet("");
        FAIL();
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedHeader);
    }
}

TEST_CASE("non numeric tokens are rejected") {
    std::string text = testing::identity_nnet_text();
    const auto pos = text.find("-1,");
    text.replace(pos, 3, "oops,");
    try {
        parse_nnet(text);
        FAIL();
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonNumericToken);
    }
}

TEST_CASE("non positive ranges are rejected") {
    std::string text = testing::identity_nnet_text();
    const auto pos = text.find("1,1,\n1,\n");
    REQUIRE(pos != std::string::npos);
    std::string corrupted = text;
    corrupted.replace(pos, 4, "0,1,");
    try {
        parse_nnet(corrupted);
        FAIL();
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonPositiveRange);
    }
}

TEST_CASE("crlf endings and trailing commas are tolerated") {
    std::string text = testing::identity_nnet_text();
    std::string crlf;
    for (char c : text) {
        if (c == '\n') crlf += "\r\n";
        else crlf += c;
    }
    CHECK(parse_nnet(crlf) == parse_nnet(text));

    // Without trailing commas. The flag line is kept verbatim, so align it
    // before comparing.
    std::string bare;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == ',' && i + 1 < text.size() && text[i + 1] == '\n') continue;
        bare += text[i];
    }
    NNetDocument from_bare = parse_nnet(bare);
    CHECK(from_bare.flag_line == "0");
    from_bare.flag_line = "0,";
    CHECK(from_bare == parse_nnet(text));
}

TEST_CASE("flag line round trips verbatim") {
    std::string text = testing::identity_nnet_text();
    const auto pos = text.find("0,\n-1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 2, "0");
    const NNetDocument doc = parse_nnet(text);
    CHECK(doc.flag_line == "0");
    CHECK(write_nnet(doc).find("\n0\n") != std::string::npos);
}

TEST_CASE("layer size disagreement is rejected") {
    std::string text = testing::identity_nnet_text();
    const auto pos = text.find("1,1,1,\n");
    std::string corrupted = text;
    corrupted.replace(pos, 7, "1,2,1,\n");
    try {
        parse_nnet(corrupted);
        FAIL();
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}
