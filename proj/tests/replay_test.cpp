#include <doctest.h>

#include <cmath>
#include <vector>

#include "mocco/harness/oracles.hpp"
#include "mocco/replay/replay.hpp"

using namespace mocco;
using namespace mocco::replay;

namespace {

Transition make_transition(int tag) {
  Transition t;
  t.state = {static_cast<double>(tag), 0.5};
  t.action = {0.1 * tag};
  t.reward = tag;
  t.next_state = {static_cast<double>(tag) + 1.0, 0.5};
  t.done = false;
  return t;
}

}  // namespace

TEST_CASE("episode staging preserves order and clears") {
  EpisodeBuffer ep;
  CHECK(ep.empty());
  for (int k = 0; k < 5; ++k) ep.stage(make_transition(k));
  CHECK(ep.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(ep.staged()[k].reward == k);
  ep.clear();
  CHECK(ep.empty());
}

TEST_CASE("compute_returns hand examples") {
  const std::vector<double> rewards = {1.0, 2.0, 3.0};

  // gamma = 0 keeps only the immediate rewards.
  CHECK(compute_returns(rewards, 0.0) == rewards);

  // gamma = 0.5: R2 = 3, R1 = 2 + 1.5 = 3.5, R0 = 1 + 1.75 = 2.75.
  CHECK(compute_returns(rewards, 0.5) == std::vector<double>{2.75, 3.5, 3.0});

  // gamma = 0.9 against the same arithmetic spelled out.
  const auto r9 = compute_returns(rewards, 0.9);
  CHECK(r9[2] == 3.0);
  CHECK(r9[1] == 2.0 + 0.9 * 3.0);
  CHECK(r9[0] == 1.0 + 0.9 * (2.0 + 0.9 * 3.0));

  CHECK(compute_returns({}, 0.9).empty());
  CHECK(compute_returns({7.0}, 0.123) == std::vector<double>{7.0});
}

TEST_CASE("compute_returns follows the backward recurrence bitwise") {
  RandomStream rng(5);
  for (double gamma : {0.0, 0.5, 0.9, 0.99}) {
    std::vector<double> rewards(200);
    for (double& r : rewards) r = rng.uniform(-5.0, 5.0);
    const auto returns = compute_returns(rewards, gamma);
    REQUIRE(returns.size() == rewards.size());
    CHECK(returns.back() == rewards.back());
    for (size_t i = 0; i + 1 < rewards.size(); ++i)
      CHECK(returns[i] == rewards[i] + gamma * returns[i + 1]);

    // Forward-order summation agrees to rounding error.
    for (size_t i = 0; i < rewards.size(); i += 37) {
      std::vector<double> tail(rewards.begin() + i, rewards.end());
      CHECK(returns[i] ==
            doctest::Approx(oracles::discounted_return_forward(tail, gamma)).epsilon(1e-10));
    }
  }
}

TEST_CASE("compute_returns validates gamma") {
  CHECK_THROWS_AS(compute_returns({1.0}, -0.1), ConfigError);
  CHECK_THROWS_AS(compute_returns({1.0}, 1.1), ConfigError);
  CHECK_NOTHROW(compute_returns({1.0}, 1.0));
  CHECK_NOTHROW(compute_returns({1.0}, 0.0));
}

TEST_CASE("finalize_episode fills both buffers and empties the stage") {
  EpisodeBuffer ep;
  RingBuffer<Transition> main_buffer(100);
  RingBuffer<MCRecord> mc_buffer(100);

  // A single staged step: its MC return is exactly the reward.
  Transition only = make_transition(0);
  only.reward = -2.5;
  ep.stage(only);
  finalize_episode(ep, main_buffer, mc_buffer, 0.99);
  CHECK(main_buffer.size() == 1);
  CHECK(mc_buffer.size() == 1);
  CHECK(mc_buffer[0].mc_return == -2.5);
  CHECK(ep.empty());

  // A longer episode lands in insertion order with the exact recurrence.
  std::vector<double> rewards;
  for (int k = 0; k < 10; ++k) {
    ep.stage(make_transition(k));
    rewards.push_back(k);
  }
  finalize_episode(ep, main_buffer, mc_buffer, 0.9);
  CHECK(main_buffer.size() == 11);
  CHECK(mc_buffer.size() == 11);
  const auto want = compute_returns(rewards, 0.9);
  for (int k = 0; k < 10; ++k) {
    CHECK(mc_buffer[1 + k].mc_return == want[k]);
    CHECK(mc_buffer[1 + k].state == main_buffer[1 + k].state);
    CHECK(mc_buffer[1 + k].action == main_buffer[1 + k].action);
  }

  // Flushing an empty stage changes nothing.
  finalize_episode(ep, main_buffer, mc_buffer, 0.9);
  CHECK(main_buffer.size() == 11);
  CHECK(mc_buffer.size() == 11);
}

TEST_CASE("ring buffer rejects zero capacity") {
  CHECK_THROWS_AS(RingBuffer<int>(0), ConfigError);
}

TEST_CASE("ring buffer overwrites oldest first") {
  RingBuffer<int> ring(4);
  for (int k = 0; k < 4; ++k) ring.push(k);
  CHECK(ring.size() == 4);
  CHECK(ring.oldest(0) == 0);

  ring.push(4);  // evicts 0
  ring.push(5);  // evicts 1
  CHECK(ring.size() == 4);
  CHECK(ring.oldest(0) == 2);
  CHECK(ring.oldest(1) == 3);
  CHECK(ring.oldest(2) == 4);
  CHECK(ring.oldest(3) == 5);

  for (int k = 6; k < 100; ++k) ring.push(k);
  CHECK(ring.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(ring.oldest(i) == 96 + i);
}

TEST_CASE("sample_uniform basics") {
  RingBuffer<int> ring(10);
  RandomStream rng(17);
  std::vector<const int*> out;

  CHECK_FALSE(sample_uniform(ring, 1, rng, out));
  CHECK(out.empty());

  ring.push(42);
  CHECK_FALSE(sample_uniform(ring, 2, rng, out));
  CHECK(sample_uniform(ring, 1, rng, out));
  REQUIRE(out.size() == 1);
  CHECK(*out[0] == 42);

  // A size-1 buffer always yields the same element.
  for (int k = 0; k < 20; ++k) {
    sample_uniform(ring, 1, rng, out);
    CHECK(*out[0] == 42);
  }
}

TEST_CASE("sample_uniform is deterministic per stream state") {
  RingBuffer<int> ring(64);
  for (int k = 0; k < 64; ++k) ring.push(k);
  RandomStream a(900), b(900);
  std::vector<const int*> oa, ob;
  for (int rep = 0; rep < 10; ++rep) {
    CHECK(sample_uniform(ring, 32, a, oa));
    CHECK(sample_uniform(ring, 32, b, ob));
    for (size_t i = 0; i < oa.size(); ++i) CHECK(*oa[i] == *ob[i]);
  }
}

TEST_CASE("undersized sampling consumes no randomness") {
  RingBuffer<int> ring(8);
  ring.push(1);
  RandomStream a(123), b(123);
  std::vector<const int*> out;
  CHECK_FALSE(sample_uniform(ring, 4, a, out));
  CHECK_FALSE(sample_uniform(ring, 4, a, out));
  // `a` must still be in lockstep with the untouched stream.
  CHECK(a.engine()() == b.engine()());
}

TEST_CASE("sample_uniform is unbiased across slots") {
  RingBuffer<int> ring(10);
  for (int k = 0; k < 10; ++k) ring.push(k);
  RandomStream rng(31);
  std::vector<const int*> out;
  std::vector<long long> counts(10, 0);
  for (int rep = 0; rep < 10000; ++rep) {
    REQUIRE(sample_uniform(ring, 10, rng, out));
    for (const int* p : out) ++counts[static_cast<size_t>(*p)];
  }
  // Each slot expects n*p = 10000 with sigma = sqrt(n*p*(1-p)) ~ 94.9;
  // 5 sigma keeps the check deterministic-in-practice for a fixed seed.
  for (long long c : counts) {
    CHECK(c > 10000 - 475);
    CHECK(c < 10000 + 475);
  }
}

TEST_CASE("truncated episodes keep done=false for bootstrapping") {
  // The staging path stores `done` as given; time-limit truncation is the
  // caller writing done=false while the MC return still treats the episode
  // as finished. finalize must not rewrite either.
  EpisodeBuffer ep;
  RingBuffer<Transition> main_buffer(10);
  RingBuffer<MCRecord> mc_buffer(10);
  Transition t = make_transition(1);
  t.done = false;
  t.reward = 2.0;
  ep.stage(t);
  Transition last = make_transition(2);
  last.done = false;  // truncated, not terminal
  last.reward = 3.0;
  ep.stage(last);
  finalize_episode(ep, main_buffer, mc_buffer, 0.5);
  CHECK_FALSE(main_buffer[0].done);
  CHECK_FALSE(main_buffer[1].done);
  CHECK(mc_buffer[0].mc_return == 2.0 + 0.5 * 3.0);
  CHECK(mc_buffer[1].mc_return == 3.0);
}
