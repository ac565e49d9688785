#ifndef KGQA_ERRORS_HPP
#define KGQA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kgqa {

// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define KGQA_DEFINE_ERROR(NAME)                    \
  struct NAME : Error {                            \
    using Error::Error;                            \
  }

// kg_store
KGQA_DEFINE_ERROR(ConflictingId);
KGQA_DEFINE_ERROR(UnknownEntity);
KGQA_DEFINE_ERROR(IoFailure);
KGQA_DEFINE_ERROR(UnknownName);

// vectors
KGQA_DEFINE_ERROR(DimensionMismatch);
KGQA_DEFINE_ERROR(ParseFailure);
KGQA_DEFINE_ERROR(LengthMismatch);
KGQA_DEFINE_ERROR(EmptyCorpus);

// ner
KGQA_DEFINE_ERROR(NoFeasiblePath);
KGQA_DEFINE_ERROR(InvalidBioSequence);

// matcher
KGQA_DEFINE_ERROR(DuplicateTemplateId);
KGQA_DEFINE_ERROR(MalformedTemplate);
KGQA_DEFINE_ERROR(NoTemplates);

// qa_engine
KGQA_DEFINE_ERROR(NoEntityFound);
KGQA_DEFINE_ERROR(NoTemplateMatch);

// metrics
KGQA_DEFINE_ERROR(EmptyDataset);
KGQA_DEFINE_ERROR(UndefinedMetric);
KGQA_DEFINE_ERROR(EmptyCandidate);
KGQA_DEFINE_ERROR(NoReferences);
KGQA_DEFINE_ERROR(ReferenceTooShort);
KGQA_DEFINE_ERROR(EmptyReference);

#undef KGQA_DEFINE_ERROR

}  // namespace kgqa

#endif  // KGQA_ERRORS_HPP
