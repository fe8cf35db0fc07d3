#pragma once

#include "treehash/analyze.hpp"
#include "treehash/bits.hpp"
#include "treehash/coding.hpp"
#include "treehash/error.hpp"
#include "treehash/exec.hpp"
#include "treehash/interleave.hpp"
#include "treehash/keccak.hpp"
#include "treehash/params_file.hpp"
#include "treehash/schedule.hpp"
#include "treehash/topology.hpp"
