#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"

using namespace flatlabel;

namespace {

void expect_round_trip(const LabelArchive& ar, const Graph& g) {
  auto bytes = ar.serialize();
  LabelArchive back = LabelArchive::deserialize(bytes);
  EXPECT_EQ(back.kind(), ar.kind());
  EXPECT_EQ(back.fallback(), ar.fallback());
  EXPECT_EQ(back.size(), g.size());
  EXPECT_EQ(back.meta_words(), ar.meta_words());
  EXPECT_EQ(back.serialize(), bytes);
  EXPECT_EQ(oracle::mismatches(g, [&](Vertex u, Vertex v) { return back.adjacent(u, v); }), 0u);
}

}  // namespace

TEST(Archive, TwRoundTrip) {
  KTreeInstance kt = gen_ktree(1, 80, 3, 0.7);
  expect_round_trip(LabelArchive::from(tw_encode(kt.graph, kt.decomposition)), kt.graph);
}

TEST(Archive, ProductRoundTrip) {
  ProductInstance inst = gen_product_instance(2, 20, 2, 9, 0.8);
  expect_round_trip(LabelArchive::from(product_encode(inst.graph, inst.embedding, inst.host_decomposition, {}, true)),
                    inst.graph);
}

TEST(Archive, FlatAndFallbackRoundTrip) {
  ProductInstance big = gen_sized_instance(3, 500, 3);
  expect_round_trip(LabelArchive::from(flat_encode(big.graph, big.embedding, big.host_decomposition)), big.graph);
  ProductInstance tiny = gen_adversarial("tiny-n", 3, 6);
  LabelArchive ar = LabelArchive::from(flat_encode(tiny.graph, tiny.embedding, tiny.host_decomposition));
  EXPECT_TRUE(ar.fallback());
  expect_round_trip(ar, tiny.graph);
}

TEST(Archive, HeaderLayout) {
  KTreeInstance kt = gen_ktree(4, 10, 1);
  LabelArchive ar = LabelArchive::from(tw_encode(kt.graph, kt.decomposition));
  auto bytes = ar.serialize();
  ASSERT_GE(bytes.size(), 32u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "FLBL");
  auto word = [&](std::size_t i) {
    return static_cast<std::uint32_t>(bytes[i] | bytes[i + 1] << 8 | bytes[i + 2] << 16 | bytes[i + 3] << 24);
  };
  EXPECT_EQ(word(4), archive_version);
  EXPECT_EQ(word(8), 1u);
  EXPECT_EQ(word(12), 0u);
  EXPECT_EQ(word(16), 10u);
  EXPECT_EQ(word(28), TwSchemeMeta::word_count);
}

TEST(Archive, MalformedInputRejected) {
  KTreeInstance kt = gen_ktree(5, 30, 2);
  auto bytes = LabelArchive::from(tw_encode(kt.graph, kt.decomposition)).serialize();

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(LabelArchive::deserialize(bad_magic), DecodeError);

  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(LabelArchive::deserialize(truncated), DecodeError);

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(LabelArchive::deserialize(trailing), DecodeError);

  auto bad_kind = bytes;
  bad_kind[8] = 9;
  EXPECT_THROW(LabelArchive::deserialize(bad_kind), DecodeError);

  auto bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_THROW(LabelArchive::deserialize(bad_version), DecodeError);

  EXPECT_THROW(LabelArchive::deserialize(std::vector<std::uint8_t>{}), DecodeError);
}

TEST(Archive, FileRoundTrip) {
  ProductInstance inst = gen_sized_instance(6, 200, 2);
  LabelArchive ar = LabelArchive::from(flat_encode(inst.graph, inst.embedding, inst.host_decomposition));
  auto path = std::filesystem::temp_directory_path() / "flatlabel_archive_test.flbl";
  ar.save(path.string());
  LabelArchive back = LabelArchive::load(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(back.serialize(), ar.serialize());
  EXPECT_THROW(LabelArchive::load(path.string()), std::runtime_error);
}

TEST(Archive, LabelAccessChecksRange) {
  KTreeInstance kt = gen_ktree(7, 12, 1);
  LabelArchive ar = LabelArchive::from(tw_encode(kt.graph, kt.decomposition));
  EXPECT_THROW(ar.label(12), std::out_of_range);
  EXPECT_THROW(ar.adjacent(std::size_t{3}, std::size_t{3}), std::invalid_argument);
}

TEST(Archive, SchemeNames) {
  for (auto k : {SchemeKind::tw, SchemeKind::product, SchemeKind::flat}) EXPECT_EQ(parse_scheme(to_string(k)), k);
  EXPECT_THROW(parse_scheme("planar"), std::invalid_argument);
}
