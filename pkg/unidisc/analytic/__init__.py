"""Map descriptors, jets and path integration"""
