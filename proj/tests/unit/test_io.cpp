#include <gtest/gtest.h>

#include "flatlabel/io.hpp"
#include "oracles.hpp"

using namespace flatlabel;

TEST(Io, GraphTextRoundTrip) {
  KTreeInstance kt = gen_ktree(1, 40, 2, 0.7);
  EXPECT_EQ(parse_graph(graph_to_text(kt.graph)), kt.graph);
  EXPECT_EQ(parse_graph(graph_to_json(kt.graph).dump()), kt.graph);
}

TEST(Io, GraphTextErrors) {
  EXPECT_THROW(parse_graph("3"), FormatError);
  EXPECT_THROW(parse_graph("3 2\n0 1\n"), FormatError);
  EXPECT_THROW(parse_graph("3 1\n0 1\n2 0\n"), FormatError);
  EXPECT_THROW(parse_graph("3 1\n0 -1\n"), FormatError);
  EXPECT_THROW(parse_graph("3 1\n0 5\n"), std::invalid_argument);
  EXPECT_THROW(parse_graph(R"({"n": 3})"), FormatError);
}

TEST(Io, EmbeddingAndDecompositionRoundTrip) {
  ProductInstance inst = gen_product_instance(2, 10, 2, 5, 0.7);
  ProductEmbedding e = embedding_from_json(Json::parse(embedding_to_json(inst.embedding).dump()));
  EXPECT_EQ(e.host, inst.embedding.host);
  EXPECT_EQ(e.path_len, inst.embedding.path_len);
  EXPECT_EQ(e.map, inst.embedding.map);
  TreeDecomposition td = decomposition_from_json(Json::parse(decomposition_to_json(inst.host_decomposition).dump()));
  EXPECT_EQ(td.parent, inst.host_decomposition.parent);
  EXPECT_EQ(td.bags, inst.host_decomposition.bags);
  EXPECT_THROW(decomposition_from_json(Json::parse(R"({"parent": [-1], "bags": []})")), FormatError);
  EXPECT_THROW(embedding_from_json(Json::parse(R"({"d": 1})")), FormatError);
}

TEST(Io, VertexSets) {
  EXPECT_EQ(parse_vertex_set("[3, 1, 2]").members(), (std::vector<Vertex>{1, 2, 3}));
  EXPECT_EQ(parse_vertex_set("4 0\n2").members(), (std::vector<Vertex>{0, 2, 4}));
  EXPECT_TRUE(parse_vertex_set("").empty());
  EXPECT_THROW(parse_vertex_set("1 x"), FormatError);
  EXPECT_THROW(parse_vertex_set("-1"), FormatError);
}

TEST(Io, BidecompositionJson) {
  KTreeInstance kt = gen_ktree(3, 60, 2);
  TwEncoding enc = tw_encode(kt.graph, kt.decomposition);
  Json j = bidecomposition_to_json(enc.bidecomposition);
  EXPECT_EQ(j["height"].get<std::uint32_t>(), enc.bidecomposition.height());
  EXPECT_EQ(j["nodes"].size(), enc.bidecomposition.node_count());
}
