#include <catch_amalgamated.hpp>

#include <string>

#include "dxmcp/model.hpp"

using namespace dxmcp;

namespace {

bool mentions(const ValidationError& e, const std::string& text) {
  for (const auto& p : e.problems())
    if (p.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("null_is_true examples") {
  const HypothesisSpec hyp{0.8, 0.7, 0.025};
  CHECK(null_is_true({{0.8}, {1.0}}, hyp, 0));
  CHECK_FALSE(null_is_true({{0.9}, {0.9}}, hyp, 0));
  CHECK(null_is_true({{1.0}, {0.7}}, hyp, 0));
  CHECK_THROWS_AS(null_is_true({{0.9}, {0.9}}, hyp, 1), std::out_of_range);
}

TEST_CASE("null_is_true is monotone in the thresholds") {
  const TruthSet truth{{0.7, 0.85, 0.95}, {0.9, 0.75, 0.81}};
  for (double se0 = 0.6; se0 < 0.99; se0 += 0.05) {
    for (double sp0 = 0.6; sp0 < 0.99; sp0 += 0.05) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (!null_is_true(truth, {se0, sp0, 0.025}, j)) continue;
        CHECK(null_is_true(truth, {se0 + 0.05, sp0, 0.025}, j));
        CHECK(null_is_true(truth, {se0, sp0 + 0.05, 0.025}, j));
      }
    }
  }
}

TEST_CASE("hypothesis validation") {
  CHECK_NOTHROW(HypothesisSpec{}.validate());
  CHECK_THROWS_AS((HypothesisSpec{0.0, 0.8, 0.025}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((HypothesisSpec{0.8, 1.0, 0.025}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((HypothesisSpec{0.8, 0.8, 0.6}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((HypothesisSpec{0.8, 0.8, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("validate_study flags constant columns") {
  RawStudy raw;
  raw.q1 = {{1}, {1}};
  raw.q0 = {{1}, {1}};
  const auto v = validate_study(raw);
  CHECK(v.data.m() == 1);
  CHECK(v.data.n1() == 2);
  CHECK(v.data.n0() == 2);
  CHECK(v.constant_columns_q1 == std::vector<std::size_t>{0});
  CHECK(v.constant_columns_q0 == std::vector<std::size_t>{0});
  CHECK(v.data.test_names == std::vector<std::string>{"test_1"});
}

TEST_CASE("validate_study names offending entries") {
  RawStudy raw;
  raw.q1 = {{1, 0}, {0, 2}};
  raw.q0 = {{1, 0}, {-1, 1}};
  try {
    validate_study(raw);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() == 2);
    CHECK(mentions(e, "group 1, row 1, col 1"));
    CHECK(mentions(e, "group 0, row 1, col 0"));
  }
}

TEST_CASE("validate_study rejects shape problems") {
  RawStudy mismatch;
  mismatch.q1 = {{1, 0}};
  mismatch.q0 = {{1}};
  CHECK_THROWS_AS(validate_study(mismatch), ValidationError);

  RawStudy ragged;
  ragged.q1 = {{1, 0}, {1}};
  ragged.q0 = {{1, 0}};
  CHECK_THROWS_AS(validate_study(ragged), ValidationError);

  RawStudy empty;
  empty.q1 = {};
  empty.q0 = {{1}};
  CHECK_THROWS_AS(validate_study(empty), ValidationError);

  RawStudy names;
  names.q1 = {{1, 0}};
  names.q0 = {{1, 0}};
  names.test_names = {"only_one"};
  CHECK_THROWS_AS(validate_study(names), ValidationError);
}

TEST_CASE("to_raw round-trips and fingerprints are content based") {
  RawStudy raw;
  raw.q1 = {{1, 0}, {0, 1}, {1, 1}};
  raw.q0 = {{0, 0}, {1, 1}};
  raw.test_names = {"a", "b"};
  const auto data = validate_study(raw).data;
  const auto back = to_raw(data);
  CHECK(back.q1 == raw.q1);
  CHECK(back.q0 == raw.q0);
  CHECK(validate_study(back).data == data);

  auto other = data;
  other.q0(1, 1) = 0;
  CHECK(dataset_fingerprint(data) == dataset_fingerprint(validate_study(back).data));
  CHECK(dataset_fingerprint(data) != dataset_fingerprint(other));
  CHECK(data.q1.column_sum(0) == 2);
  CHECK(data.q1.column_sum(1) == 2);
}
