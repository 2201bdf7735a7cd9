#pragma once

#include "wsd/baselines.hpp"
#include "wsd/checkpoint.hpp"
#include "wsd/classifier.hpp"
#include "wsd/config.hpp"
#include "wsd/corpus.hpp"
#include "wsd/embeddings.hpp"
#include "wsd/experiment.hpp"
#include "wsd/metrics.hpp"
#include "wsd/nn/adam.hpp"
#include "wsd/nn/model.hpp"
#include "wsd/nn/train.hpp"
