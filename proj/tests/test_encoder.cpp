// Character encoder: state alignment, attention, both model heads, and
// the finite-difference verification of the full pair-loss backward pass.
#include <cmath>

#include "c2v/encoder.hpp"
#include "doctest.h"
#include "support/model_fixtures.hpp"
#include "support/test_util.hpp"

using namespace c2v;
using c2v::test::full_pair_loss_gradcheck;
using c2v::test::make_char_model;
using c2v::test::random_word;

TEST_CASE("encode_word emits n+1 aligned states") {
  ModelParams p = make_char_model(ModelKind::kChar2vec, 3);
  auto ids = p.chars.char_sequence("a", OnUnknownChar::kError);
  EncodeCache cache;
  encode_word(p, ids, true, cache);
  CHECK(cache.n == 1);
  CHECK(cache.states.rows == 2);
  CHECK(cache.states.cols == p.config.d_word);
  CHECK(cache.fwd_steps.size() == 2);
  CHECK(cache.bwd_steps.size() == 2);

  auto ids4 = p.chars.char_sequence("abcd", OnUnknownChar::kError);
  encode_word(p, ids4, true, cache);
  CHECK(cache.states.rows == 5);

  std::vector<uint32_t> bogus{0, 999, 1};
  CHECK_THROWS_AS(encode_word(p, bogus, true, cache), DataError);
}

TEST_CASE("encode_word with zero parameters yields zero states") {
  ModelParams p = make_char_model(ModelKind::kChar2vec, 5);
  p.char_emb.zero();
  p.fwd.wx.zero();
  p.fwd.wh.zero();
  std::fill(p.fwd.b.begin(), p.fwd.b.end(), 0.0);
  p.bwd.wx.zero();
  p.bwd.wh.zero();
  std::fill(p.bwd.b.begin(), p.bwd.b.end(), 0.0);
  p.w_comp.zero();
  std::fill(p.b_comp.begin(), p.b_comp.end(), 0.0);

  EncodeCache cache;
  encode_word(p, p.chars.char_sequence("abc", OnUnknownChar::kError), true, cache);
  for (double v : cache.states.a) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("reversing the word and swapping directions reverses the states") {
  ModelParams p = make_char_model(ModelKind::kChar2vec, 11, 4, 4, 6);

  // Mirror model: swapped LSTMs, swapped begin/end symbols, swapped
  // compression column blocks.
  ModelParams q = p;
  q.fwd = p.bwd;
  q.bwd = p.fwd;
  for (size_t j = 0; j < q.char_emb.cols; ++j) {
    std::swap(q.char_emb(CharVocab::kBow, j), q.char_emb(CharVocab::kEow, j));
  }
  const size_t d_lstm = p.config.d_lstm;
  for (size_t r = 0; r < q.w_comp.rows; ++r) {
    for (size_t c = 0; c < d_lstm; ++c) {
      q.w_comp(r, c) = p.w_comp(r, c + d_lstm);
      q.w_comp(r, c + d_lstm) = p.w_comp(r, c);
    }
  }

  std::string word = "abcde";
  std::string rev(word.rbegin(), word.rend());
  EncodeCache cw, cr;
  encode_word(p, p.chars.char_sequence(word, OnUnknownChar::kError), true, cw);
  encode_word(q, q.chars.char_sequence(rev, OnUnknownChar::kError), true, cr);
  REQUIRE(cw.states.rows == cr.states.rows);
  const size_t n = cw.n;
  for (size_t i = 0; i <= n; ++i) {
    for (size_t j = 0; j < cw.states.cols; ++j) {
      CHECK(cr.states(n - i, j) == doctest::Approx(cw.states(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("attend: single state gets weight one") {
  ModelParams p = make_char_model(ModelKind::kChar2vec, 7);
  EncodeCache cache;
  // A zero-character word is invalid upstream, so fake a single state by
  // hand: one-character words have two states, so use the smallest real
  // case and then a hand-built one-row cache.
  encode_word(p, p.chars.char_sequence("a", OnUnknownChar::kError), true, cache);
  EncodeCache single;
  single.n = 0;
  single.states = Mat(1, p.config.d_word);
  for (size_t j = 0; j < p.config.d_word; ++j) single.states(0, j) = cache.states(1, j);
  AttentionResult att;
  attend(p, single, att);
  REQUIRE(att.alpha.size() == 1);
  CHECK(att.alpha[0] == doctest::Approx(1.0));
  for (size_t j = 0; j < p.config.d_word; ++j) {
    CHECK(att.word_vec[j] == doctest::Approx(single.states(0, j)));
  }
}

TEST_CASE("attend: zero attention vector reduces to the state mean") {
  ModelParams p = make_char_model(ModelKind::kChar2vec, 13);
  std::fill(p.v_attn.begin(), p.v_attn.end(), 0.0);
  EncodeCache cache;
  encode_word(p, p.chars.char_sequence("fade", OnUnknownChar::kError), true, cache);
  AttentionResult att;
  attend(p, cache, att);
  const size_t m = cache.states.rows;
  for (double a : att.alpha) CHECK(a == doctest::Approx(1.0 / m).epsilon(1e-12));
  for (size_t j = 0; j < p.config.d_word; ++j) {
    double mean = 0.0;
    for (size_t i = 0; i < m; ++i) mean += cache.states(i, j);
    mean /= static_cast<double>(m);
    CHECK(std::abs(att.word_vec[j] - mean) < 1e-6);
  }
}

TEST_CASE("attention weights form a probability vector; f(w) in state hull") {
  Rng rng(99);
  ModelParams p = make_char_model(ModelKind::kChar2vec, 17);
  for (int trial = 0; trial < 20; ++trial) {
    std::string w = random_word(p, rng, 1, 7);
    AttentionResult att = attention_for_word(p, w, OnUnknownChar::kError);
    double sum = 0.0;
    for (double a : att.alpha) {
      CHECK(a >= 0.0);
      sum += a;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));

    EncodeCache cache;
    encode_word(p, p.chars.char_sequence(w, OnUnknownChar::kError), true, cache);
    for (size_t j = 0; j < p.config.d_word; ++j) {
      double lo = cache.states(0, j), hi = cache.states(0, j);
      for (size_t i = 1; i < cache.states.rows; ++i) {
        lo = std::min(lo, cache.states(i, j));
        hi = std::max(hi, cache.states(i, j));
      }
      CHECK(att.word_vec[j] >= lo - 1e-12);
      CHECK(att.word_vec[j] <= hi + 1e-12);
    }
  }
}

TEST_CASE("word_vector dispatch per model kind") {
  ModelParams sgns = make_char_model(ModelKind::kSgns, 19);
  CHECK(!sgns.word_vector("zzzz").has_value());
  auto known = sgns.word_vector("abc");
  REQUIRE(known.has_value());
  CHECK(known->size() == sgns.config.d_word);

  ModelParams c2v = make_char_model(ModelKind::kChar2vec, 19);
  auto unseen = c2v.word_vector("cafe");  // not in vocab, chars known
  REQUIRE(unseen.has_value());
  CHECK(unseen->size() == c2v.config.d_word);

  // Unknown character at inference maps to UNK instead of failing.
  auto oov_char = c2v.word_vector("a#b");
  REQUIRE(oov_char.has_value());
  CHECK(all_finite(*oov_char));

  // One-character word: the vector is the alpha-mix of its two states.
  EncodeCache cache;
  encode_word(c2v, c2v.chars.char_sequence("a", OnUnknownChar::kError), true, cache);
  AttentionResult att;
  attend(c2v, cache, att);
  auto via_api = c2v.word_vector("a");
  REQUIRE(via_api.has_value());
  for (size_t j = 0; j < c2v.config.d_word; ++j) {
    double mix = att.alpha[0] * cache.states(0, j) + att.alpha[1] * cache.states(1, j);
    CHECK((*via_api)[j] == doctest::Approx(mix).epsilon(1e-12));
    CHECK((*via_api)[j] == doctest::Approx(att.word_vec[j]).epsilon(1e-12));
  }
}

TEST_CASE("pair_loss closed forms") {
  // Zero target vector: every dot product is 0, loss = (k+1) ln 2.
  ModelParams p = make_char_model(ModelKind::kSgns, 23);
  Vec w(p.config.d_word, 0.0);
  double loss = sgns_pair_loss(w.data(), w.size(), p.context_table, 0, {1}, nullptr);
  CHECK(loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

  // Perfectly separated dots drive the loss to zero.
  Mat ctx(2, 2);
  ctx(0, 0) = 40.0;
  ctx(1, 0) = -40.0;
  Vec w2{1.0, 0.0};
  double tiny = sgns_pair_loss(w2.data(), 2, ctx, 0, {1}, nullptr);
  CHECK(tiny < 1e-10);
  CHECK(tiny >= 0.0);

  // Non-finite dot products are rejected.
  Mat bad(1, 2);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  Vec w3{1.0, 1.0};
  CHECK_THROWS_AS(sgns_pair_loss(w3.data(), 2, bad, 0, {0}, nullptr), NumericError);
}

TEST_CASE("pair_loss gradient w.r.t. target vector matches finite differences") {
  ModelParams p = make_char_model(ModelKind::kSgns, 29);
  Rng rng(31);
  Vec w(p.config.d_word);
  c2v::test::fill_uniform(w, rng, 0.9);
  Vec gw(w.size(), 0.0);
  std::vector<TensorRef> refs{c2v::test::ref_of("w", w, gw)};
  std::vector<uint32_t> negs{2, 4, 2};
  auto loss = [&](bool want_grad) {
    return sgns_pair_loss(w.data(), w.size(), p.context_table, 1, negs,
                          want_grad ? gw.data() : nullptr);
  };
  CHECK(grad_check(loss, refs, 1e-5).max_rel_err < 1e-8);
}

TEST_CASE("full char2vec pair loss passes the gradient check") {
  Rng rng(37);
  for (uint64_t seed : {101u, 202u, 303u}) {
    ModelParams p = make_char_model(ModelKind::kChar2vec, seed);
    std::string word = random_word(p, rng, 2, 6);
    uint32_t ctx = static_cast<uint32_t>(rng.index(p.vocab.size()));
    std::vector<uint32_t> negs;
    for (int i = 0; i < 3; ++i) negs.push_back(static_cast<uint32_t>(rng.index(p.vocab.size())));
    GradCheckResult r = full_pair_loss_gradcheck(p, word, ctx, negs, true, 1e-5);
    INFO("worst tensor: ", r.worst_tensor, " idx ", r.worst_index);
    CHECK(r.max_rel_err < 1e-4);
  }
}

TEST_CASE("full c2v-no-att pair loss passes the gradient check") {
  Rng rng(41);
  ModelParams p = make_char_model(ModelKind::kC2vNoAtt, 404);
  std::string word = random_word(p, rng, 2, 6);
  std::vector<uint32_t> negs{1, 3, 5};
  GradCheckResult r = full_pair_loss_gradcheck(p, word, 2, negs, true, 1e-5);
  INFO("worst tensor: ", r.worst_tensor);
  CHECK(r.max_rel_err < 1e-4);
}
