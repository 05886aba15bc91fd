#pragma once

#include "treg/adam.hpp"
#include "treg/bench.hpp"
#include "treg/checkpoint.hpp"
#include "treg/common.hpp"
#include "treg/csv.hpp"
#include "treg/ensemble.hpp"
#include "treg/ensemble_io.hpp"
#include "treg/gbt.hpp"
#include "treg/metrics.hpp"
#include "treg/mha.hpp"
#include "treg/mlp.hpp"
#include "treg/synth.hpp"
#include "treg/t2t.hpp"
#include "treg/t2v.hpp"
#include "treg/tensor_file.hpp"
#include "treg/train.hpp"
#include "treg/transform.hpp"
