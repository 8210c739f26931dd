// Label a random subgraph of H x P and answer a few queries from labels alone.
#include <cstdio>

#include "flatlabel.hpp"

int main() {
  namespace fl = flatlabel;
  fl::ProductInstance inst = fl::gen_sized_instance(7, 2000, 2);
  fl::FlatEncoding enc = fl::flat_encode(inst.graph, inst.embedding, inst.host_decomposition);
  fl::LabelArchive archive = fl::LabelArchive::from(enc);
  std::printf("n=%zu, longest label %zu bits, mean %.1f bits\n", archive.size(), archive.labels().max_bits(),
              archive.labels().mean_bits());

  fl::LabelArchive restored = fl::LabelArchive::deserialize(archive.serialize());
  fl::Vertex u = 0;
  for (fl::Vertex v : inst.graph.neighbors(u))
    std::printf("%u ~ %u: %s\n", u, v, restored.adjacent(u, v) ? "adjacent" : "not adjacent");
  fl::Vertex far = static_cast<fl::Vertex>(inst.graph.size() - 1);
  std::printf("%u ~ %u: %s (graph says %s)\n", u, far, restored.adjacent(u, far) ? "adjacent" : "not adjacent",
              inst.graph.adjacent(u, far) ? "adjacent" : "not adjacent");
}
