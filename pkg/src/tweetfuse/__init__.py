"""tweetfuse: batch multimodal event detection over tweet records.

Text channel: TF-IDF over lowercased, punctuation-stripped, stopword-
filtered, stemmed tokens.  Image channel: HOG + GLCM texture statistics +
color histogram.  Channels are classified independently (KNN or linear
SVM) and combined by a reliability gate calibrated on a validation split,
or by feature concatenation.
"""

__version__ = "0.1.0"
