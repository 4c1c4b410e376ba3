#pragma once

#include "caretlab/constructions.hpp"
#include "caretlab/errors.hpp"
#include "caretlab/hindman.hpp"
#include "caretlab/idempotent.hpp"
#include "caretlab/io.hpp"
#include "caretlab/lp.hpp"
#include "caretlab/magma.hpp"
#include "caretlab/measure.hpp"
#include "caretlab/parallel.hpp"
#include "caretlab/ramsey.hpp"
#include "caretlab/rational.hpp"
#include "caretlab/thompson.hpp"
#include "caretlab/tree.hpp"
