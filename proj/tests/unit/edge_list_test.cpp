#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "peerlab/error.hpp"
#include "peerlab/netcore.hpp"

namespace peerlab {
namespace {

TEST(EdgeList, WriterEmitsHeaderAndEachEdgeOnce) {
  std::ostringstream out;
  write_edge_list(out, testing::fig1_graph());
  EXPECT_EQ(out.str(), "n=4\n0 1 1\n0 2 1\n1 2 1\n2 3 1\n");
}

TEST(EdgeList, ReaderSkipsCommentsAndBlankLines) {
  std::istringstream in("# a comment\n\nn=3\n# edge\n0 1 2.5\n2 1 1\n");
  const Graph g = read_edge_list(in);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.weight(1, 0), 2.5);
  EXPECT_EQ(g.weight(1, 2), 1.0);
  EXPECT_EQ(g.weight(0, 2), 0.0);
}

TEST(EdgeList, RoundTripPreservesWeightsExactly) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = testing::random_graph(30, 0.2, seed);
    std::stringstream buf;
    write_edge_list(buf, g);
    EXPECT_EQ(read_edge_list(buf).weights(), g.weights());
  }
}

TEST(EdgeList, IsolatedTrailingNodesSurviveViaHeader) {
  std::stringstream buf;
  write_edge_list(buf, Graph::empty(5));
  EXPECT_EQ(read_edge_list(buf).size(), 5u);
}

TEST(EdgeList, Errors) {
  std::istringstream missing("0 1 1\n");
  EXPECT_THROW(read_edge_list(missing), ParseError);
  std::istringstream bad("n=2\n0 x 1\n");
  EXPECT_THROW(read_edge_list(bad), ParseError);
  std::istringstream range("n=2\n0 2 1\n");
  EXPECT_THROW(read_edge_list(range), ParseError);
  std::istringstream loop("n=2\n1 1 1\n");
  EXPECT_THROW(read_edge_list(loop), ParseError);
  std::istringstream extra("n=2\n0 1 1 9\n");
  EXPECT_THROW(read_edge_list(extra), ParseError);
}

}  // namespace
}  // namespace peerlab
