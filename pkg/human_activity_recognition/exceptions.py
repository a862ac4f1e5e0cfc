class IngestError(IOError):
    pass


class UnknownActivity(ValueError):
    pass


class MalformedCorpus(ValueError):
    pass


class ManifestMismatch(ValueError):
    pass


class ManifestDigestMismatch(ValueError):
    pass


class InsufficientSegments(ValueError):
    pass


class InvalidPreprocessConfig(ValueError):
    pass


class DegenerateChannel(ValueError):
    pass


class InvalidFeatureConfig(ValueError):
    pass


class InvalidScale(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


class AutodiffError(RuntimeError):
    pass


class UnknownModelKind(ValueError):
    pass


class InputContractViolation(ValueError):
    pass


class MissingRepresentation(ValueError):
    pass


class UnsupportedOperation(TypeError):
    pass


class SingleClassTrainingSet(ValueError):
    pass


class LabelOutOfRange(ValueError):
    pass


class NoPositivePairs(ValueError):
    pass


class InfeasibleSampling(ValueError):
    pass


class TrainingDiverged(FloatingPointError):
    def __init__(self, message: str, epoch: int = None, batch: int = None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class SplitLeakage(RuntimeError):
    pass


class CheckpointError(IOError):
    pass


class ConfigError(ValueError):
    pass


class DigestConflict(ValueError):
    def __init__(self, message: str, sections: list = None):
        super().__init__(message)
        self.sections = sections or []


class EmptySelection(ValueError):
    pass


class AllModelsFailed(RuntimeError):
    pass
