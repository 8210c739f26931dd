#pragma once

#include "flatlabel/archive.hpp"
#include "flatlabel/bidecomposition.hpp"
#include "flatlabel/codec.hpp"
#include "flatlabel/embedding.hpp"
#include "flatlabel/flat_labeling.hpp"
#include "flatlabel/graph.hpp"
#include "flatlabel/instance_gen.hpp"
#include "flatlabel/io.hpp"
#include "flatlabel/ledger.hpp"
#include "flatlabel/product_labeling.hpp"
#include "flatlabel/treewidth.hpp"
#include "flatlabel/tw_labeling.hpp"
