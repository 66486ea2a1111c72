#pragma once

#include "qkge/ansatz.hpp"
#include "qkge/checkpoint.hpp"
#include "qkge/data.hpp"
#include "qkge/errors.hpp"
#include "qkge/eval.hpp"
#include "qkge/gradient.hpp"
#include "qkge/model.hpp"
#include "qkge/parallel.hpp"
#include "qkge/random.hpp"
#include "qkge/sampling.hpp"
#include "qkge/simulator.hpp"
#include "qkge/training.hpp"
#include "qkge/types.hpp"
